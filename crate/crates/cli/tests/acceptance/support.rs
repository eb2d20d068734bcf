//! Independent numerical oracles for the acceptance suite. Nothing here may
//! call the closed forms it is used to check.

use fepnet_core::mathutil::normal_cdf;
use fepnet_core::rng::{sample_standard_normal, SimRng};

pub fn gaussian_pdf(x: f64, mu: f64, var: f64) -> f64 {
    let norm = 1.0 / (2.0 * std::f64::consts::PI * var).sqrt();
    norm * (-(x - mu) * (x - mu) / (2.0 * var)).exp()
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

fn adaptive_inner<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    adaptive_inner(f, a, m, left, tol / 2.0, depth - 1)
        + adaptive_inner(f, m, b, right, tol / 2.0, depth - 1)
}

pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let whole = simpson(f, a, b);
    adaptive_inner(f, a, b, whole, tol, 48)
}

/// KL(q ‖ p) between Gaussians by direct integration of q·ln(q/p), in
/// q-standardized coordinates (the integrand there is a Gaussian times an
/// exact quadratic, which adaptive Simpson resolves to near machine
/// precision at any parameter scale).
pub fn kl_by_quadrature(q_mu: f64, q_var: f64, p_mu: f64, p_var: f64) -> f64 {
    let q_sd = q_var.sqrt();
    let tau = std::f64::consts::TAU;
    let integrand = |t: f64| {
        let b = q_mu + q_sd * t;
        // log densities, never underflowing
        let ln_q = -0.5 * (tau * q_var).ln() - (b - q_mu) * (b - q_mu) / (2.0 * q_var);
        let ln_p = -0.5 * (tau * p_var).ln() - (b - p_mu) * (b - p_mu) / (2.0 * p_var);
        q_sd * gaussian_pdf(b, q_mu, q_var) * (ln_q - ln_p)
    };
    let rough = adaptive_simpson(&integrand, -14.0, 14.0, 1e-6);
    adaptive_simpson(&integrand, -14.0, 14.0, 1e-13 * rough.abs().max(1.0))
}

/// Monte-Carlo estimate of E_{b~q}[(D − αb − β)²/(2σ_D²)]: (mean, stderr).
pub fn mc_expected_nll(
    q_mu: f64,
    q_var: f64,
    alpha: f64,
    beta: f64,
    var_d: f64,
    d_stat: f64,
    n: usize,
    rng: &mut SimRng,
) -> (f64, f64) {
    let sd = q_var.sqrt();
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..n {
        let b = q_mu + sd * sample_standard_normal(rng);
        let r = d_stat - alpha * b - beta;
        let v = r * r / (2.0 * var_d);
        sum += v;
        sumsq += v * v;
    }
    let mean = sum / n as f64;
    let var = (sumsq / n as f64 - mean * mean).max(0.0);
    (mean, (var / n as f64).sqrt())
}

pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Derivative-free minimizer: golden-section search plus one wide-spaced
/// parabolic refinement (exact for locally quadratic objectives).
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > 1e-6 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let x0 = 0.5 * (lo + hi);
    let h = 1.0f64.max(1e-3 * x0.abs());
    let (x1, x2, x3) = (x0 - h, x0, x0 + h);
    let (f1, f2, f3) = (f(x1), f(x2), f(x3));
    let denom = (x2 - x1) * (f2 - f3) - (x2 - x3) * (f2 - f1);
    if denom.abs() < 1e-300 {
        return x0;
    }
    let numer = (x2 - x1) * (x2 - x1) * (f2 - f3) - (x2 - x3) * (x2 - x3) * (f2 - f1);
    x2 - 0.5 * numer / denom
}

/// KS distance between lattice-valued samples (spacing `step`) and
/// N(mu, sd²), with the model CDF read at bin midpoints (the standard
/// continuity correction for integer-valued data).
pub fn ks_lattice_vs_normal(samples: &[f64], step: f64, mu: f64, sd: f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    let mut i = 0usize;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        sup = sup.max((j as f64 / n - normal_cdf(v + 0.5 * step, mu, sd)).abs());
        sup = sup.max((i as f64 / n - normal_cdf(v - 0.5 * step, mu, sd)).abs());
        i = j;
    }
    sup
}

pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
