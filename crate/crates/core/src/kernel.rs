//! Attachment kernels and the characteristic scales that shape them.
//!
//! Two kernels are provided. The mechanistic kernel inverts the time an agent
//! needs to detect and reach a cluster, with belief, sensing and velocity caps
//! applied. The phenomenological kernel is the piecewise law the regimes
//! predict directly: flat below the noise scale, a power law with exponent ν
//! in the optimal window, and an exponential cutoff beyond k★.

use crate::belief::{coupling_c, velocity_from_belief, GaussianBelief, LikelihoodModel};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("degenerate kernel spec: {0}")]
    DegenerateSpec(String),
    #[error(
        "inconsistent scales: d_noise ({d_noise}) must lie below k_star ({k_star}); \
         no optimal-detection window exists"
    )]
    InconsistentScales { d_noise: f64, k_star: f64 },
    #[error("kernel must be positive at d = {d}, got {value}")]
    NonPositiveKernel { d: usize, value: f64 },
    #[error("local_log_slope needs d >= 2, got {0}")]
    SlopeOutOfRange(usize),
}

/// The three information-processing limits an agent carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentLimits {
    /// Most neighbours detectable per side.
    pub k_max: usize,
    /// Largest believable slope magnitude.
    pub b_max: f64,
    /// Top speed.
    pub v_max: f64,
}

impl AgentLimits {
    /// Default belief cap σ_π/α: the compact and expanded forms of d_belief
    /// coincide exactly under this identification.
    pub fn default_b_max(prior: &GaussianBelief, lik: &LikelihoodModel) -> f64 {
        prior.var.sqrt() / lik.alpha
    }
}

/// Everything needed to evaluate both kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub lik: LikelihoodModel,
    pub prior: GaussianBelief,
    pub limits: AgentLimits,
    /// Velocity gain γ.
    pub gain: f64,
    /// Detection noise scale η.
    pub eta: f64,
    /// Detection-time exponent: T_det ∝ d^(−beta_det/2). Strictly above 2 the
    /// detection and travel phases compound into a super-linear kernel; at
    /// exactly 2 both phases scale as 1/d and the kernel is exactly linear.
    pub beta_det: f64,
    /// Characteristic travel distance.
    pub l_char: f64,
    /// Detection-time scale (zero disables the detection phase).
    pub t0: f64,
    /// Exponential decay scale of the saturated branch.
    pub decay_s: f64,
    /// Super-linear exponent of the phenomenological kernel.
    pub nu: f64,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<(), KernelError> {
        let mut problems = Vec::new();
        if self.limits.k_max == 0 {
            problems.push("k_max must be >= 1".to_string());
        }
        if !(self.limits.b_max > 0.0) {
            problems.push(format!("b_max must be positive, got {}", self.limits.b_max));
        }
        if !(self.limits.v_max > 0.0) {
            problems.push(format!("v_max must be positive, got {}", self.limits.v_max));
        }
        if !(self.gain > 0.0) {
            problems.push(format!("gain must be positive, got {}", self.gain));
        }
        if !(self.eta > 0.0) {
            problems.push(format!("eta must be positive, got {}", self.eta));
        }
        if !(self.beta_det >= 0.0) {
            problems.push(format!("beta_det must be >= 0, got {}", self.beta_det));
        }
        if !(self.l_char > 0.0) {
            problems.push(format!("l_char must be positive, got {}", self.l_char));
        }
        if !(self.t0 >= 0.0) {
            problems.push(format!("t0 must be >= 0, got {}", self.t0));
        }
        if !(self.decay_s > 0.0) {
            problems.push(format!("decay_s must be positive, got {}", self.decay_s));
        }
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            problems.push(format!("nu must be positive and finite, got {}", self.nu));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(KernelError::DegenerateSpec(problems.join("; ")))
        }
    }
}

/// The scales at which belief, sensing, ability and noise start to matter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicScales {
    /// b_max / C — beliefs cannot strengthen past this cluster size.
    pub d_belief: f64,
    /// k_max — detection saturates here.
    pub d_sensory: f64,
    /// v_max / (γC) — speed cannot grow past this cluster size.
    pub d_ability: f64,
    /// η/α — below this, signals drown in noise.
    pub d_noise: f64,
    /// min(d_belief, d_sensory, d_ability): onset of saturation.
    pub k_star: f64,
}

/// Regime a cluster of size d falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NoiseDominated,
    OptimalDetection,
    Saturated,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::NoiseDominated => "noise-dominated",
            Regime::OptimalDetection => "optimal-detection",
            Regime::Saturated => "saturated",
        }
    }
}

/// Derive all characteristic scales from a spec.
///
/// Errors when the coupling C is zero (α = 0): every scale diverges.
pub fn characteristic_scales(spec: &KernelSpec) -> Result<CharacteristicScales, KernelError> {
    let coupling = coupling_c(&spec.prior, &spec.lik);
    if !(coupling > 0.0) {
        return Err(KernelError::DegenerateSpec(format!(
            "coupling C = {coupling} (alpha = {}); characteristic scales diverge",
            spec.lik.alpha
        )));
    }
    let d_belief = spec.limits.b_max / coupling;
    let d_sensory = spec.limits.k_max as f64;
    let d_ability = spec.limits.v_max / (spec.gain * coupling);
    let d_noise = spec.eta / spec.lik.alpha;
    let k_star = d_belief.min(d_sensory).min(d_ability);
    Ok(CharacteristicScales {
        d_belief,
        d_sensory,
        d_ability,
        d_noise,
        k_star,
    })
}

/// Classify a cluster size. Boundaries assign as written: d ≤ d_noise is
/// noise-dominated first, then d ≥ k★ is saturated.
pub fn classify_regime(d: usize, scales: &CharacteristicScales) -> Result<Regime, KernelError> {
    if scales.d_noise >= scales.k_star {
        return Err(KernelError::InconsistentScales {
            d_noise: scales.d_noise,
            k_star: scales.k_star,
        });
    }
    let d = d as f64;
    if d <= scales.d_noise {
        Ok(Regime::NoiseDominated)
    } else if d >= scales.k_star {
        Ok(Regime::Saturated)
    } else {
        Ok(Regime::OptimalDetection)
    }
}

/// Time to detect and reach a cluster of size d ≥ 1:
/// t0·d_eff^(−β/2) + l_char/v(d), with d_eff = min(d, k_max),
/// μ = min(C·d_eff, b_max) and v = min(γμ, v_max).
///
/// Returns the infinite-time sentinel (f64::INFINITY) when the velocity is
/// zero, which only happens for degenerate specs with C = 0.
pub fn attachment_time(d: usize, spec: &KernelSpec) -> f64 {
    debug_assert!(d >= 1, "attachment_time requires d >= 1");
    let coupling = coupling_c(&spec.prior, &spec.lik);
    let d_eff = (d.min(spec.limits.k_max)) as f64;
    let mu = (coupling * d_eff).min(spec.limits.b_max);
    let v = velocity_from_belief(mu, spec.gain, spec.limits.v_max);
    let t_detect = if spec.t0 == 0.0 {
        0.0
    } else {
        spec.t0 * d_eff.powf(-spec.beta_det / 2.0)
    };
    if v <= 0.0 {
        return f64::INFINITY;
    }
    t_detect + spec.l_char / v
}

/// Mechanistic kernel: 1 / attachment_time. Non-decreasing in d; constant
/// once every cap binds.
pub fn mechanistic_kernel(d: usize, spec: &KernelSpec) -> f64 {
    1.0 / attachment_time(d, spec)
}

/// Phenomenological kernel from raw scale numbers, continuous at both
/// boundaries:
///   K(d) = 1                          for d ≤ d_noise
///   K(d) = (d/d_noise)^ν              for d_noise < d ≤ k★
///   K(d) = K(k★)·exp(−(d−k★)/decay)   for d > k★
pub fn phenomenological_from_scales(
    d: usize,
    d_noise: f64,
    k_star: f64,
    nu: f64,
    decay_s: f64,
) -> f64 {
    let d = d as f64;
    if d <= d_noise {
        1.0
    } else if d <= k_star {
        (d / d_noise).powf(nu)
    } else {
        (k_star / d_noise).powf(nu) * (-(d - k_star) / decay_s).exp()
    }
}

/// Phenomenological kernel for a spec's scales; errors when no optimal window
/// exists (d_noise ≥ k★).
pub fn phenomenological_kernel(
    d: usize,
    scales: &CharacteristicScales,
    spec: &KernelSpec,
) -> Result<f64, KernelError> {
    if scales.d_noise >= scales.k_star {
        return Err(KernelError::InconsistentScales {
            d_noise: scales.d_noise,
            k_star: scales.k_star,
        });
    }
    Ok(phenomenological_from_scales(
        d,
        scales.d_noise,
        scales.k_star,
        spec.nu,
        spec.decay_s,
    ))
}

/// Effective local exponent:
/// [ln K(d+1) − ln K(d−1)] / [ln(d+1) − ln(d−1)], for d ≥ 2.
pub fn local_log_slope<F: Fn(usize) -> f64>(kernel: F, d: usize) -> Result<f64, KernelError> {
    if d < 2 {
        return Err(KernelError::SlopeOutOfRange(d));
    }
    let lo = kernel(d - 1);
    let hi = kernel(d + 1);
    if !(lo > 0.0) || !lo.is_finite() {
        return Err(KernelError::NonPositiveKernel {
            d: d - 1,
            value: lo,
        });
    }
    if !(hi > 0.0) || !hi.is_finite() {
        return Err(KernelError::NonPositiveKernel {
            d: d + 1,
            value: hi,
        });
    }
    Ok((hi.ln() - lo.ln()) / (((d + 1) as f64).ln() - ((d - 1) as f64).ln()))
}

/// Default ν: the measured local slope of the mechanistic kernel at the
/// geometric midpoint of the optimal window (d_noise, k★).
pub fn default_nu(spec: &KernelSpec) -> Result<f64, KernelError> {
    let scales = characteristic_scales(spec)?;
    if scales.d_noise >= scales.k_star {
        return Err(KernelError::InconsistentScales {
            d_noise: scales.d_noise,
            k_star: scales.k_star,
        });
    }
    let mid = (scales.d_noise.max(1.0) * scales.k_star).sqrt().round() as usize;
    local_log_slope(|d| mechanistic_kernel(d, spec), mid.max(2))
}

/// Default exponential decay scale: k★/4, a visible knee within a decade.
pub fn default_decay_s(k_star: f64) -> f64 {
    k_star / 4.0
}
