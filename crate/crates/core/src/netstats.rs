//! Degree-distribution analysis: histograms, CCDFs, log-binned densities,
//! discrete tail fits and knee detection.

use crate::growth::Graph;
use crate::mathutil::hurwitz_zeta;
use std::collections::BTreeMap;
use thiserror::Error;

/// Fits refuse to run on fewer tail points than this.
pub const MIN_TAIL: usize = 50;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("degree histogram of an empty graph is undefined")]
    EmptyGraph,
    #[error("insufficient tail: need at least {needed} nodes at degree >= {k_from}, got {got}")]
    InsufficientTail {
        needed: usize,
        k_from: usize,
        got: usize,
    },
    #[error("degenerate tail: zero variance beyond degree {k_from}")]
    DegenerateTail { k_from: usize },
    #[error("CCDF spans {got:.2} decades, need at least {needed:.2}")]
    InsufficientRange { got: f64, needed: f64 },
}

/// Exact degree counts of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHistogram {
    counts: BTreeMap<usize, u64>,
    total: u64,
}

impl DegreeHistogram {
    pub fn from_counts(counts: BTreeMap<usize, u64>) -> Result<Self, StatsError> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(StatsError::EmptyGraph);
        }
        let counts = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        Ok(Self { counts, total })
    }

    pub fn from_degrees<I: IntoIterator<Item = usize>>(degrees: I) -> Result<Self, StatsError> {
        let mut counts = BTreeMap::new();
        for d in degrees {
            *counts.entry(d).or_insert(0u64) += 1;
        }
        Self::from_counts(counts)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, degree: usize) -> u64 {
        self.counts.get(&degree).copied().unwrap_or(0)
    }

    /// (degree, count) pairs in ascending degree order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    pub fn min_degree(&self) -> usize {
        *self
            .counts
            .keys()
            .next()
            .expect("non-empty by construction")
    }

    pub fn max_degree(&self) -> usize {
        *self
            .counts
            .keys()
            .next_back()
            .expect("non-empty by construction")
    }

    /// Fraction of nodes at the minimum observed degree.
    pub fn min_degree_fraction(&self) -> f64 {
        self.count(self.min_degree()) as f64 / self.total as f64
    }

    /// Number of nodes with degree >= k.
    pub fn tail_count(&self, k: usize) -> u64 {
        self.counts.range(k..).map(|(_, &c)| c).sum()
    }

    /// P(K >= k).
    pub fn ccdf_at(&self, k: usize) -> f64 {
        self.tail_count(k) as f64 / self.total as f64
    }
}

/// Exact degree histogram; errors on an empty graph.
pub fn degree_histogram(graph: &Graph) -> Result<DegreeHistogram, StatsError> {
    if graph.node_count() == 0 {
        return Err(StatsError::EmptyGraph);
    }
    DegreeHistogram::from_degrees(graph.degrees().iter().copied())
}

/// Complementary CDF at each observed degree: (k, P(K >= k)), ascending in k.
/// Non-increasing, first value exactly 1.
pub fn ccdf(hist: &DegreeHistogram) -> Vec<(usize, f64)> {
    let mut remaining = hist.total() as f64;
    let total = hist.total() as f64;
    let mut out = Vec::new();
    for (k, c) in hist.iter() {
        out.push((k, remaining / total));
        remaining -= c as f64;
    }
    out
}

/// One geometric bin of a log-binned density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBin {
    /// Smallest integer degree in the bin.
    pub lo: usize,
    /// Largest integer degree in the bin.
    pub hi: usize,
    /// Geometric centre sqrt(lo·hi) (0 for the degree-0 bin).
    pub center: f64,
    /// Probability mass divided by the number of integers in the bin.
    pub density: f64,
}

fn bin_index(k: usize, bins_per_decade: usize) -> usize {
    ((k as f64).log10() * bins_per_decade as f64 + 1e-9).floor() as usize
}

/// Log-binned degree density: probability mass per integer degree, over bins
/// of geometrically growing width. Degree 0, when present, occupies its own
/// unit bin. Total probability is preserved exactly.
pub fn log_binned(hist: &DegreeHistogram, bins_per_decade: usize) -> Vec<LogBin> {
    assert!(bins_per_decade >= 1);
    let total = hist.total() as f64;
    let mut mass_by_bin: BTreeMap<usize, u64> = BTreeMap::new();
    let mut zero_mass = 0u64;
    for (k, c) in hist.iter() {
        if k == 0 {
            zero_mass += c;
            continue;
        }
        *mass_by_bin
            .entry(bin_index(k, bins_per_decade))
            .or_insert(0) += c;
    }

    let mut out = Vec::new();
    if zero_mass > 0 {
        out.push(LogBin {
            lo: 0,
            hi: 0,
            center: 0.0,
            density: zero_mass as f64 / total,
        });
    }
    for (&idx, &mass) in &mass_by_bin {
        // integer boundaries of the bin under the same assignment rule
        let mut lo = (10f64).powf(idx as f64 / bins_per_decade as f64).floor() as usize;
        lo = lo.max(1);
        while bin_index(lo, bins_per_decade) < idx {
            lo += 1;
        }
        let mut hi = (10f64)
            .powf((idx + 1) as f64 / bins_per_decade as f64)
            .ceil() as usize;
        while hi > lo && bin_index(hi, bins_per_decade) > idx {
            hi -= 1;
        }
        let width = (hi - lo + 1) as f64;
        out.push(LogBin {
            lo,
            hi,
            center: ((lo as f64) * (hi as f64)).sqrt(),
            density: mass as f64 / total / width,
        });
    }
    out
}

/// Tail model family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailModel {
    PowerLaw,
    Exponential,
}

impl TailModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            TailModel::PowerLaw => "power-law",
            TailModel::Exponential => "exponential",
        }
    }
}

/// Result of a tail fit: the exponent gamma_deg for a power law, the decay
/// rate for an exponential.
#[derive(Debug, Clone, PartialEq)]
pub struct TailFit {
    pub model: TailModel,
    pub parameter: f64,
    pub k_min: usize,
    pub log_likelihood: f64,
    pub ks: f64,
}

/// Tail degrees (degree, count) at or above k_min, plus tail size.
fn tail_of(hist: &DegreeHistogram, k_min: usize) -> (Vec<(usize, u64)>, u64) {
    let tail: Vec<(usize, u64)> = hist.iter().filter(|&(k, _)| k >= k_min).collect();
    let n: u64 = tail.iter().map(|&(_, c)| c).sum();
    (tail, n)
}

/// ζ(s, a) for every integer a in [a_lo, a_hi + 1], via one tail evaluation
/// and the downward recurrence ζ(s, a) = ζ(s, a+1) + a^(-s).
fn zeta_ladder(s: f64, a_lo: usize, a_hi: usize) -> Vec<f64> {
    let mut values = vec![0.0; a_hi - a_lo + 2];
    values[a_hi + 1 - a_lo] = hurwitz_zeta(s, (a_hi + 1) as f64);
    for a in (a_lo..=a_hi).rev() {
        values[a - a_lo] = values[a + 1 - a_lo] + (a as f64).powf(-s);
    }
    values
}

/// Discrete power-law fit of the tail above k_min, for a fixed k_min.
fn power_law_at(hist: &DegreeHistogram, k_min: usize) -> Option<TailFit> {
    let (tail, n) = tail_of(hist, k_min);
    if (n as usize) < MIN_TAIL {
        return None;
    }
    let shift = k_min as f64 - 0.5;
    let log_sum: f64 = tail
        .iter()
        .map(|&(k, c)| c as f64 * (k as f64 / shift).ln())
        .sum();
    let gamma = 1.0 + n as f64 / log_sum;
    if !(gamma > 1.0) || !gamma.is_finite() {
        return None;
    }

    let k_hi = tail.last().map(|&(k, _)| k).unwrap_or(k_min);
    let ladder = zeta_ladder(gamma, k_min, k_hi + 1);
    let norm = ladder[0]; // ζ(γ, k_min)

    // KS between the empirical tail CDF and the fitted discrete law,
    // evaluated at every observed tail degree.
    let mut ks: f64 = 0.0;
    let mut seen = 0u64;
    for &(k, c) in &tail {
        seen += c;
        let empirical = seen as f64 / n as f64;
        let model = 1.0 - ladder[k + 1 - k_min] / norm;
        ks = ks.max((empirical - model).abs());
    }

    let ln_k_sum: f64 = tail.iter().map(|&(k, c)| c as f64 * (k as f64).ln()).sum();
    let log_likelihood = -gamma * ln_k_sum - n as f64 * norm.ln();
    Some(TailFit {
        model: TailModel::PowerLaw,
        parameter: gamma,
        k_min,
        log_likelihood,
        ks,
    })
}

/// Discrete power-law MLE with the standard half-shift, scanning candidate
/// k_min values and keeping the KS-minimizing fit.
pub fn fit_power_law(hist: &DegreeHistogram) -> Result<TailFit, StatsError> {
    let mut best: Option<TailFit> = None;
    for (k_min, _) in hist.iter() {
        if k_min == 0 {
            continue;
        }
        if let Some(fit) = power_law_at(hist, k_min) {
            if best.as_ref().is_none_or(|b| fit.ks < b.ks) {
                best = Some(fit);
            }
        }
    }
    best.ok_or(StatsError::InsufficientTail {
        needed: MIN_TAIL,
        k_from: hist.min_degree(),
        got: hist.total() as usize,
    })
}

/// Shifted-geometric (discrete exponential) MLE on the tail k >= k_from:
/// P(K = k) = (1 − q)·q^(k − k_from) with rate = −ln q.
pub fn fit_exponential_tail(hist: &DegreeHistogram, k_from: usize) -> Result<TailFit, StatsError> {
    let (tail, n) = tail_of(hist, k_from);
    if (n as usize) < MIN_TAIL {
        return Err(StatsError::InsufficientTail {
            needed: MIN_TAIL,
            k_from,
            got: n as usize,
        });
    }
    let excess_mean: f64 = tail
        .iter()
        .map(|&(k, c)| c as f64 * (k - k_from) as f64)
        .sum::<f64>()
        / n as f64;
    if excess_mean <= 0.0 {
        return Err(StatsError::DegenerateTail { k_from });
    }
    let q = excess_mean / (1.0 + excess_mean);
    let rate = -q.ln();

    let mut ks: f64 = 0.0;
    let mut seen = 0u64;
    for &(k, c) in &tail {
        seen += c;
        let empirical = seen as f64 / n as f64;
        let model = 1.0 - q.powi((k - k_from) as i32 + 1);
        ks = ks.max((empirical - model).abs());
    }

    let excess_sum: f64 = excess_mean * n as f64;
    let log_likelihood = n as f64 * (1.0 - q).ln() + excess_sum * q.ln();
    Ok(TailFit {
        model: TailModel::Exponential,
        parameter: rate,
        k_min: k_from,
        log_likelihood,
        ks,
    })
}

const KNEE_GRID_PER_DECADE: usize = 25;
const KNEE_MIN_DECADES: f64 = 1.5;
/// Head of the CCDF excluded from the knee fit: points above this value carry
/// the discrete-support curvature every integer distribution shows near its
/// minimum degree, not tail structure.
const KNEE_HEAD_CCDF: f64 = 0.02;

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for c in col..3 {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for c in (row + 1)..3 {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Least-squares fit of y = b0 + b1·x + b2·max(0, x − x0); returns the
/// coefficients and the SSE.
fn hinge_fit(xs: &[f64], ys: &[f64], x0: f64) -> Option<([f64; 3], f64)> {
    let mut sums = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let h = (x - x0).max(0.0);
        let row = [1.0, x, h];
        for i in 0..3 {
            for j in 0..3 {
                sums[i][j] += row[i] * row[j];
            }
            rhs[i] += row[i] * y;
        }
    }
    let beta = solve3(sums, rhs)?;
    let sse = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let pred = beta[0] + beta[1] * x + beta[2] * (x - x0).max(0.0);
            (y - pred) * (y - pred)
        })
        .sum();
    Some((beta, sse))
}

fn line_sse(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return f64::INFINITY;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum()
}

/// Locate the knee of a CCDF: the breakpoint of the best continuous
/// two-segment line in log-log space, scanned over a log-spaced grid.
/// Confidence is the squared-error reduction over a single line, in [0, 1].
///
/// A knee is the onset of suppression, so only concave breakpoints (second
/// slope steeper than the first) qualify; a CCDF with no concave break gets
/// confidence zero. The very head of the CCDF (above [`KNEE_HEAD_CCDF`]) is
/// excluded from the fit — it carries the discrete-support curvature of
/// integer data, not tail structure. The span precondition applies to the
/// input as given.
pub fn detect_knee(ccdf_points: &[(usize, f64)]) -> Result<(usize, f64), StatsError> {
    let points: Vec<(usize, f64)> = ccdf_points
        .iter()
        .copied()
        .filter(|&(k, p)| k >= 1 && p > 0.0)
        .collect();
    if points.len() < 4 {
        return Err(StatsError::InsufficientRange {
            got: 0.0,
            needed: KNEE_MIN_DECADES,
        });
    }
    let k_lo = points.first().unwrap().0 as f64;
    let k_hi = points.last().unwrap().0 as f64;
    let decades = (k_hi / k_lo).log10();
    if decades < KNEE_MIN_DECADES {
        return Err(StatsError::InsufficientRange {
            got: decades,
            needed: KNEE_MIN_DECADES,
        });
    }

    let trimmed: Vec<(usize, f64)> = points
        .iter()
        .copied()
        .filter(|&(_, p)| p <= KNEE_HEAD_CCDF)
        .collect();
    let fit_points = if trimmed.len() >= 6 {
        &trimmed
    } else {
        &points
    };

    // resample the step-function CCDF onto a log grid so every decade gets
    // equal leverage in the fit
    let fit_lo = fit_points.first().unwrap().0 as f64;
    let fit_hi = fit_points.last().unwrap().0 as f64;
    let fit_decades = (fit_hi / fit_lo).log10().max(1e-9);
    let grid_len = (fit_decades * KNEE_GRID_PER_DECADE as f64).ceil() as usize + 1;
    let mut xs = Vec::with_capacity(grid_len);
    let mut ys = Vec::with_capacity(grid_len);
    let log_lo = fit_lo.log10();
    let step = fit_decades / (grid_len - 1).max(1) as f64;
    for i in 0..grid_len {
        let k_real = (10f64).powf(log_lo + step * i as f64);
        // P(K >= k_real) = CCDF at the smallest observed degree >= k_real
        let idx = fit_points.partition_point(|&(k, _)| (k as f64) < k_real - 1e-9);
        if idx >= fit_points.len() {
            break;
        }
        xs.push(k_real.ln());
        ys.push(fit_points[idx].1.ln());
    }

    let sse_one = line_sse(&xs, &ys);
    let mut best_sse = f64::INFINITY;
    let mut best_x0 = None;
    for b in 2..xs.len().saturating_sub(2) {
        if let Some((beta, sse)) = hinge_fit(&xs, &ys, xs[b]) {
            if beta[2] > 0.0 {
                continue; // convex break: not a knee
            }
            if sse < best_sse {
                best_sse = sse;
                best_x0 = Some(xs[b]);
            }
        }
    }
    let x0 = match best_x0 {
        Some(x0) => x0,
        None => return Ok((xs[xs.len() / 2].exp().round() as usize, 0.0)),
    };
    if !best_sse.is_finite() || !(sse_one > 0.0) {
        return Ok((x0.exp().round() as usize, 0.0));
    }
    let confidence = (1.0 - best_sse / sse_one).clamp(0.0, 1.0);
    Ok((x0.exp().round() as usize, confidence))
}

/// Sup-norm distance between the empirical CDFs of two histograms; symmetric,
/// in [0, 1].
pub fn ks_distance(a: &DegreeHistogram, b: &DegreeHistogram) -> f64 {
    let mut degrees: Vec<usize> = a
        .iter()
        .map(|(k, _)| k)
        .chain(b.iter().map(|(k, _)| k))
        .collect();
    degrees.sort_unstable();
    degrees.dedup();
    let (mut ca, mut cb) = (0u64, 0u64);
    let mut sup: f64 = 0.0;
    for k in degrees {
        ca += a.count(k);
        cb += b.count(k);
        let fa = ca as f64 / a.total() as f64;
        let fb = cb as f64 / b.total() as f64;
        sup = sup.max((fa - fb).abs());
    }
    sup
}

/// Total-variation distance between a histogram and a model pmf indexed by
/// degree (index = degree).
pub fn total_variation(hist: &DegreeHistogram, model_pmf: &[f64]) -> f64 {
    let total = hist.total() as f64;
    let max_k = hist.max_degree().max(model_pmf.len().saturating_sub(1));
    let mut tv = 0.0;
    for k in 0..=max_k {
        let p = hist.count(k) as f64 / total;
        let q = model_pmf.get(k).copied().unwrap_or(0.0);
        tv += (p - q).abs();
    }
    tv / 2.0
}
