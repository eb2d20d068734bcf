//! Gaussian belief updating by variational free-energy minimisation.
//!
//! An agent holds a Gaussian prior over an environmental slope `b`, observes a
//! scalar detection statistic `D` whose likelihood mean is linear in `b`, and
//! represents its posterior (recognition density) as another Gaussian. Under
//! these assumptions the free energy, its gradient in the posterior mean, and
//! the optimal posterior are all closed-form.
//!
//! Convention: the expected negative log-likelihood drops every additive term
//! that does not depend on the posterior mean. Differences, gradients and
//! argmins are unaffected; absolute free-energy values are only meaningful up
//! to that constant.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BeliefError {
    #[error("{which} variance must be positive and finite, got {value}")]
    NonPositiveVariance { which: &'static str, value: f64 },
    #[error("{which} must be finite, got {value}")]
    NonFinite { which: &'static str, value: f64 },
}

/// A Gaussian over the slope parameter: prior or recognition density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBelief {
    /// Mean (slope units).
    pub mu: f64,
    /// Variance (slope² units), strictly positive.
    pub var: f64,
}

impl GaussianBelief {
    pub fn new(mu: f64, var: f64) -> Result<Self, BeliefError> {
        if !mu.is_finite() {
            return Err(BeliefError::NonFinite {
                which: "belief mean",
                value: mu,
            });
        }
        if !(var > 0.0) || !var.is_finite() {
            return Err(BeliefError::NonPositiveVariance {
                which: "belief",
                value: var,
            });
        }
        Ok(Self { mu, var })
    }
}

/// Linear-Gaussian observation model: D | b ~ N(alpha·b + beta, var_d).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodModel {
    /// Sensitivity of the detection statistic to the slope (detections per unit slope).
    pub alpha: f64,
    /// Baseline bias of the detection process.
    pub beta: f64,
    /// Sensory noise variance, strictly positive.
    pub var_d: f64,
}

impl LikelihoodModel {
    pub fn new(alpha: f64, beta: f64, var_d: f64) -> Result<Self, BeliefError> {
        if !alpha.is_finite() {
            return Err(BeliefError::NonFinite {
                which: "likelihood alpha",
                value: alpha,
            });
        }
        if !beta.is_finite() {
            return Err(BeliefError::NonFinite {
                which: "likelihood beta",
                value: beta,
            });
        }
        if !(var_d > 0.0) || !var_d.is_finite() {
            return Err(BeliefError::NonPositiveVariance {
                which: "likelihood",
                value: var_d,
            });
        }
        Ok(Self { alpha, beta, var_d })
    }
}

/// A single observed detection statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    /// Signed detection statistic D (right minus left detections per window).
    pub d_stat: f64,
}

/// KL(q ‖ p) between two Gaussians.
///
/// ½ [ ln(σp²/σq²) + (σq² + (μq − μp)²)/σp² − 1 ]; non-negative, zero iff q = p.
pub fn kl_gaussians(q: &GaussianBelief, p: &GaussianBelief) -> Result<f64, BeliefError> {
    if !(q.var > 0.0) {
        return Err(BeliefError::NonPositiveVariance {
            which: "q",
            value: q.var,
        });
    }
    if !(p.var > 0.0) {
        return Err(BeliefError::NonPositiveVariance {
            which: "p",
            value: p.var,
        });
    }
    let dmu = q.mu - p.mu;
    Ok(0.5 * ((p.var / q.var).ln() + (q.var + dmu * dmu) / p.var - 1.0))
}

/// Expected negative log-likelihood −E_q[ln L(D | b)], up to μ-independent constants.
///
/// [(D−β)² − 2α(D−β)μ_b + α²(μ_b² + σ_b²)] / (2 σ_D²)
pub fn expected_nll(q: &GaussianBelief, lik: &LikelihoodModel, obs: &Observation) -> f64 {
    let centered = obs.d_stat - lik.beta;
    let a = lik.alpha;
    (centered * centered - 2.0 * a * centered * q.mu + a * a * (q.mu * q.mu + q.var))
        / (2.0 * lik.var_d)
}

/// Variational free energy F[q] = KL(q ‖ prior) + expected_nll, up to the
/// additive-constant convention stated at module level.
pub fn free_energy(
    q: &GaussianBelief,
    prior: &GaussianBelief,
    lik: &LikelihoodModel,
    obs: &Observation,
) -> Result<f64, BeliefError> {
    Ok(kl_gaussians(q, prior)? + expected_nll(q, lik, obs))
}

/// ∂F/∂μ_b = (μ_b − μ_π)/σ_π² + (−α(D−β) + α²μ_b)/σ_D².
///
/// Independent of the posterior variance, which is held fixed during the mean
/// update.
pub fn grad_f_mu(
    mu_b: f64,
    prior: &GaussianBelief,
    lik: &LikelihoodModel,
    obs: &Observation,
) -> f64 {
    let centered = obs.d_stat - lik.beta;
    (mu_b - prior.mu) / prior.var
        + (-lik.alpha * centered + lik.alpha * lik.alpha * mu_b) / lik.var_d
}

/// The stationary point of the free energy in μ_b: the precision-weighted
/// blend of prior mean and scaled evidence.
pub fn posterior_mean(prior: &GaussianBelief, lik: &LikelihoodModel, obs: &Observation) -> f64 {
    let centered = obs.d_stat - lik.beta;
    let evidence_precision = lik.alpha / lik.var_d;
    let prior_precision = 1.0 / prior.var;
    (evidence_precision * centered + prior.mu * prior_precision)
        / (lik.alpha * lik.alpha / lik.var_d + prior_precision)
}

/// Posterior variance from the precision sum: (1/σ_π² + α²/σ_D²)⁻¹. Never
/// exceeds the prior variance.
pub fn posterior_var(prior: &GaussianBelief, lik: &LikelihoodModel) -> f64 {
    1.0 / (1.0 / prior.var + lik.alpha * lik.alpha / lik.var_d)
}

/// Coupling C = α²σ_π² / (α²σ_π² + σ_D²) between cluster size and belief
/// strength; with a flat prior mean and no bias, μ_b = C·d exactly when D = αd.
pub fn coupling_c(prior: &GaussianBelief, lik: &LikelihoodModel) -> f64 {
    let a2s = lik.alpha * lik.alpha * prior.var;
    a2s / (a2s + lik.var_d)
}

/// Velocity command v = γ·μ_b clamped to ±v_max.
pub fn velocity_from_belief(mu_b: f64, gain: f64, v_max: f64) -> f64 {
    (gain * mu_b).clamp(-v_max, v_max)
}
