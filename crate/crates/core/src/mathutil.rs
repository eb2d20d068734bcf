//! Small numerical helpers shared across modules.

/// Error function, Abramowitz & Stegun 7.1.26 (|error| < 1.5e-7).
pub fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// CDF of N(mu, sigma^2) at x.
pub fn normal_cdf(x: f64, mu: f64, sigma: f64) -> f64 {
    0.5 * (1.0 + erf((x - mu) / (sigma * std::f64::consts::SQRT_2)))
}

/// Hurwitz zeta ζ(s, a) = Σ_{n≥0} (a+n)^(-s) for s > 1, a > 0.
///
/// Direct summation up to a + N with an Euler–Maclaurin tail correction;
/// accurate to well below 1e-10 for the s, a ranges used by the tail fits.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0, "hurwitz_zeta requires s > 1, got {s}");
    assert!(a > 0.0, "hurwitz_zeta requires a > 0, got {a}");
    let n_terms = 10_000usize;
    let mut sum = 0.0;
    for n in 0..n_terms {
        sum += (a + n as f64).powf(-s);
    }
    let m = a + n_terms as f64;
    // ∫_m^∞ x^{-s} dx + m^{-s}/2 + s·m^{-s-1}/12
    sum + m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s) + s * m.powf(-s - 1.0) / 12.0
}

/// Clamp a value to [-bound, bound].
pub fn clamp_abs(x: f64, bound: f64) -> f64 {
    x.clamp(-bound, bound)
}
