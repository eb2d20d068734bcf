//! Seeding and the few samplers the simulation needs.
//!
//! Every stochastic task owns its own stream. Streams are derived from a
//! master seed with a fixed split rule: `stream = seed_from_u64(master ^ task_index)`.
//! The rule is part of the reproducibility contract and must not change.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used everywhere results must be replayable.
pub type SimRng = ChaCha8Rng;

/// Stream for task `task_index` under `master_seed` (split rule: XOR).
pub fn rng_for_task(master_seed: u64, task_index: u64) -> SimRng {
    SimRng::seed_from_u64(master_seed ^ task_index)
}

/// One draw from N(0, 1) via Box–Muller (two uniforms per draw).
pub fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 1 - u ∈ (0, 1] keeps the log argument positive.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// One draw from Poisson(mean), mean ≥ 0.
///
/// Knuth's product method, chunked so large means do not underflow exp().
pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    assert!(
        mean >= 0.0 && mean.is_finite(),
        "invalid Poisson mean {mean}"
    );
    let mut remaining = mean;
    let mut total = 0u64;
    while remaining > 0.0 {
        let lambda = remaining.min(30.0);
        remaining -= lambda;
        let limit = (-lambda).exp();
        let mut product: f64 = rng.gen();
        let mut count = 0u64;
        while product > limit {
            product *= rng.gen::<f64>();
            count += 1;
        }
        total += count;
    }
    total
}
