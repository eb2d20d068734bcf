//! Neighbour detection: exact Bernoulli-sum counts, the signed detection
//! statistic, and its Gaussian approximation D ~ N(αd, η²).

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DetectionError {
    #[error("p_detect must lie in (0, 1], got {0}")]
    BadProbability(f64),
    #[error("tau must be positive, got {0}")]
    BadWindow(f64),
    #[error("eta must be positive, got {0}")]
    BadNoise(f64),
}

/// Per-window detection model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionParams {
    /// Per-neighbour detection probability per window, in (0, 1].
    pub p_detect: f64,
    /// Window duration (time units), positive.
    pub tau: f64,
    /// Noise scale η of the Gaussian approximation, positive.
    pub eta: f64,
}

impl DetectionParams {
    pub fn new(p_detect: f64, tau: f64, eta: f64) -> Result<Self, DetectionError> {
        if !(p_detect > 0.0 && p_detect <= 1.0) {
            return Err(DetectionError::BadProbability(p_detect));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(DetectionError::BadWindow(tau));
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(DetectionError::BadNoise(eta));
        }
        Ok(Self { p_detect, tau, eta })
    }

    /// Default noise scale: binomial standard deviation of a reference scene
    /// of d_ref = 10 neighbours, sqrt(d_ref·p(1−p))/τ.
    pub fn default_eta(p_detect: f64, tau: f64) -> f64 {
        const D_REF: f64 = 10.0;
        (D_REF * p_detect * (1.0 - p_detect)).sqrt() / tau
    }
}

/// What the agent is looking at: cluster members on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterScene {
    pub d_right: usize,
    pub d_left: usize,
}

/// Base detection rate α = p/τ.
pub fn alpha_rate(params: &DetectionParams) -> f64 {
    params.p_detect / params.tau
}

fn binomial_draw<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> u64 {
    let mut hits = 0u64;
    for _ in 0..n {
        if rng.gen_bool(p) {
            hits += 1;
        }
    }
    hits
}

/// Exact signed statistic: (Binomial(d_right, p) − Binomial(d_left, p)) / τ.
///
/// Mean is α·(d_right − d_left); deterministic under a fixed stream.
pub fn sample_detection_statistic<R: Rng + ?Sized>(
    scene: &ClusterScene,
    params: &DetectionParams,
    rng: &mut R,
) -> f64 {
    let right = binomial_draw(scene.d_right, params.p_detect, rng);
    let left = binomial_draw(scene.d_left, params.p_detect, rng);
    (right as f64 - left as f64) / params.tau
}

/// Parameters of the Gaussian approximation for a one-sided cluster of size d:
/// mean αd, variance η².
pub fn gaussian_stat_params(d: usize, params: &DetectionParams) -> (f64, f64) {
    (alpha_rate(params) * d as f64, params.eta * params.eta)
}

/// Signal-to-noise ratio αd/η used for the regime boundaries.
pub fn snr(d: usize, params: &DetectionParams) -> f64 {
    alpha_rate(params) * d as f64 / params.eta
}
