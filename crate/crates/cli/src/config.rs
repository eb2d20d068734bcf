//! Experiment configuration: a single JSON file fully determines a run.
//!
//! Parsing reports every violation it can find, not just the first: unknown
//! keys (with a nearest-known-key suggestion), missing required fields, and
//! invariant breaches. Defaults are filled during resolution so an emitted
//! config re-parses to an identical value.

use fepnet_core::belief::{GaussianBelief, LikelihoodModel};
use fepnet_core::detection::DetectionParams;
use fepnet_core::kernel::{
    characteristic_scales, default_decay_s, default_nu, AgentLimits, KernelSpec,
};
use fepnet_core::spatial::{InitialPlacement, UpdateOrder, WorldConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config:\n{}", .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "grow")]
    Grow,
    #[serde(rename = "grow-ba")]
    GrowBa,
    #[serde(rename = "simulate")]
    Simulate,
    #[serde(rename = "analyze")]
    Analyze,
    #[serde(rename = "sweep")]
    Sweep,
    #[serde(rename = "kernel-table")]
    KernelTable,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Grow => "grow",
            Mode::GrowBa => "grow-ba",
            Mode::Simulate => "simulate",
            Mode::Analyze => "analyze",
            Mode::Sweep => "sweep",
            Mode::KernelTable => "kernel-table",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which attachment kernel drives growth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum KernelChoice {
    #[serde(rename = "linear-ba")]
    LinearBa,
    #[serde(rename = "mechanistic")]
    Mechanistic,
    #[serde(rename = "phenomenological")]
    Phenomenological(PhenomenologicalParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhenomenologicalParams {
    pub d_noise: f64,
    pub k_star: f64,
    pub nu: f64,
    pub decay_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSection {
    pub n_final: usize,
    pub m_links: usize,
    pub seed_nodes: usize,
    pub kernel: KernelChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpecSection {
    pub alpha: f64,
    pub beta: f64,
    pub var_d: f64,
    pub prior_mu: f64,
    pub prior_var: f64,
    pub k_max: usize,
    pub b_max: f64,
    pub v_max: f64,
    pub gain: f64,
    pub eta: f64,
    pub beta_det: f64,
    pub l_char: f64,
    pub t0: f64,
    pub decay_s: f64,
    pub nu: f64,
}

impl KernelSpecSection {
    pub fn to_kernel_spec(&self) -> KernelSpec {
        KernelSpec {
            lik: LikelihoodModel {
                alpha: self.alpha,
                beta: self.beta,
                var_d: self.var_d,
            },
            prior: GaussianBelief {
                mu: self.prior_mu,
                var: self.prior_var,
            },
            limits: AgentLimits {
                k_max: self.k_max,
                b_max: self.b_max,
                v_max: self.v_max,
            },
            gain: self.gain,
            eta: self.eta,
            beta_det: self.beta_det,
            l_char: self.l_char,
            t0: self.t0,
            decay_s: self.decay_s,
            nu: self.nu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSection {
    pub domain_length: f64,
    pub sense_range: f64,
    pub link_range: f64,
    pub dt: f64,
    pub n_initial: usize,
    pub n_steps: usize,
    pub snapshot_every: usize,
    pub arrival_rate: f64,
    pub gain: f64,
    pub update_order: String,
    pub placement: PlacementChoice,
    pub detection: DetectionSection,
    pub prior: PriorSection,
    pub likelihood: LikelihoodSection,
    pub limits: LimitsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PlacementChoice {
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "clustered")]
    Clustered { width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSection {
    pub p_detect: f64,
    pub tau: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSection {
    pub mu: f64,
    pub var: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodSection {
    pub alpha: f64,
    pub beta: f64,
    pub var_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitsSection {
    pub k_max: usize,
    pub b_max: f64,
    pub v_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeSection {
    pub input: String,
    pub bins_per_decade: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelTableSection {
    pub d_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSection {
    /// Dotted path into the config, e.g. "growth.kernel.phenomenological.nu".
    pub parameter: String,
    pub values: Vec<Value>,
}

/// Fully resolved experiment configuration: every default filled, every
/// invariant checked. Serializing and re-parsing yields an equal value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub out_dir: String,
    pub seed: u64,
    pub replicates: usize,
    pub parallelism: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_spec: Option<KernelSpecSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analyze: Option<AnalyzeSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_table: Option<KernelTableSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

impl ExperimentConfig {
    pub fn world_config(&self) -> Result<WorldConfig, ConfigError> {
        let sim = self
            .simulate
            .as_ref()
            .ok_or_else(|| ConfigError::Validation(vec!["simulate section missing".into()]))?;
        Ok(WorldConfig {
            domain_length: sim.domain_length,
            sense_range: sim.sense_range,
            link_range: sim.link_range,
            dt: sim.dt,
            detection: DetectionParams {
                p_detect: sim.detection.p_detect,
                tau: sim.detection.tau,
                eta: sim.detection.eta,
            },
            prior: GaussianBelief {
                mu: sim.prior.mu,
                var: sim.prior.var,
            },
            lik: LikelihoodModel {
                alpha: sim.likelihood.alpha,
                beta: sim.likelihood.beta,
                var_d: sim.likelihood.var_d,
            },
            gain: sim.gain,
            limits: AgentLimits {
                k_max: sim.limits.k_max,
                b_max: sim.limits.b_max,
                v_max: sim.limits.v_max,
            },
            arrival_rate: sim.arrival_rate,
            n_initial: sim.n_initial,
            n_steps: sim.n_steps,
            snapshot_every: sim.snapshot_every,
            seed: self.seed,
            update_order: if sim.update_order == "sequential" {
                UpdateOrder::Sequential
            } else {
                UpdateOrder::Synchronous
            },
            placement: match sim.placement {
                PlacementChoice::Uniform => InitialPlacement::Uniform,
                PlacementChoice::Clustered { width } => InitialPlacement::Clustered { width },
            },
        })
    }
}

/// Serialize a resolved config to the canonical JSON text.
pub fn emit_config(config: &ExperimentConfig) -> String {
    let mut text = serde_json::to_string_pretty(config).expect("config serializes");
    text.push('\n');
    text
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = if ca == cb { 0 } else { 1 };
            cur[j + 1] = (prev[j + 1] + 1).min(cur[j] + 1).min(prev[j] + cost);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn suggest(key: &str, known: &[&'static str]) -> Option<&'static str> {
    known
        .iter()
        .map(|&k| (levenshtein(key, k), k))
        .filter(|&(d, _)| d <= 3)
        .min_by_key(|&(d, _)| d)
        .map(|(_, k)| k)
}

/// Known keys per config object, addressed by dotted path.
fn known_keys(path: &str) -> Option<&'static [&'static str]> {
    match path {
        "" => Some(&[
            "mode",
            "out_dir",
            "seed",
            "replicates",
            "parallelism",
            "growth",
            "kernel_spec",
            "simulate",
            "analyze",
            "kernel_table",
            "sweep",
        ]),
        "growth" => Some(&["n_final", "m_links", "seed_nodes", "kernel"]),
        "growth.kernel" => Some(&["phenomenological"]),
        "growth.kernel.phenomenological" => Some(&["d_noise", "k_star", "nu", "decay_s"]),
        "kernel_spec" => Some(&[
            "alpha",
            "beta",
            "var_d",
            "prior_mu",
            "prior_var",
            "k_max",
            "b_max",
            "v_max",
            "gain",
            "eta",
            "beta_det",
            "l_char",
            "t0",
            "decay_s",
            "nu",
        ]),
        "simulate" => Some(&[
            "domain_length",
            "sense_range",
            "link_range",
            "dt",
            "n_initial",
            "n_steps",
            "snapshot_every",
            "arrival_rate",
            "gain",
            "update_order",
            "placement",
            "detection",
            "prior",
            "likelihood",
            "limits",
        ]),
        "simulate.placement" => Some(&["clustered"]),
        "simulate.placement.clustered" => Some(&["width"]),
        "simulate.detection" => Some(&["p_detect", "tau", "eta"]),
        "simulate.prior" => Some(&["mu", "var"]),
        "simulate.likelihood" => Some(&["alpha", "beta", "var_d"]),
        "simulate.limits" => Some(&["k_max", "b_max", "v_max"]),
        "analyze" => Some(&["input", "bins_per_decade"]),
        "kernel_table" => Some(&["d_max"]),
        "sweep" => Some(&["parameter", "values"]),
        _ => None,
    }
}

fn check_keys(value: &Value, path: &str, problems: &mut Vec<String>) {
    let Value::Object(map) = value else { return };
    let Some(known) = known_keys(path) else {
        return;
    };
    for (key, child) in map {
        if !known.contains(&key.as_str()) {
            let location = if path.is_empty() {
                "top level".to_string()
            } else {
                format!("`{path}`")
            };
            match suggest(key, known) {
                Some(s) => problems.push(format!(
                    "unknown key `{key}` in {location} (did you mean `{s}`?)"
                )),
                None => problems.push(format!("unknown key `{key}` in {location}")),
            }
            continue;
        }
        let child_path = if path.is_empty() {
            key.clone()
        } else {
            format!("{path}.{key}")
        };
        check_keys(child, &child_path, problems);
    }
}

// Raw shapes with optional fields; resolution fills defaults and validates.

#[derive(Debug, Default, Deserialize)]
struct RawConfig {
    mode: Option<Mode>,
    out_dir: Option<String>,
    seed: Option<u64>,
    replicates: Option<usize>,
    parallelism: Option<usize>,
    growth: Option<RawGrowth>,
    kernel_spec: Option<RawKernelSpec>,
    simulate: Option<RawSimulate>,
    analyze: Option<RawAnalyze>,
    kernel_table: Option<RawKernelTable>,
    sweep: Option<SweepSection>,
}

#[derive(Debug, Default, Deserialize)]
struct RawGrowth {
    n_final: Option<usize>,
    m_links: Option<usize>,
    seed_nodes: Option<usize>,
    kernel: Option<Value>,
}

#[derive(Debug, Default, Deserialize)]
struct RawKernelSpec {
    alpha: Option<f64>,
    beta: Option<f64>,
    var_d: Option<f64>,
    prior_mu: Option<f64>,
    prior_var: Option<f64>,
    k_max: Option<usize>,
    b_max: Option<f64>,
    v_max: Option<f64>,
    gain: Option<f64>,
    eta: Option<f64>,
    beta_det: Option<f64>,
    l_char: Option<f64>,
    t0: Option<f64>,
    decay_s: Option<f64>,
    nu: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
struct RawSimulate {
    domain_length: Option<f64>,
    sense_range: Option<f64>,
    link_range: Option<f64>,
    dt: Option<f64>,
    n_initial: Option<usize>,
    n_steps: Option<usize>,
    snapshot_every: Option<usize>,
    arrival_rate: Option<f64>,
    gain: Option<f64>,
    update_order: Option<String>,
    placement: Option<Value>,
    detection: Option<RawDetection>,
    prior: Option<RawPrior>,
    likelihood: Option<RawLikelihood>,
    limits: Option<RawLimits>,
}

#[derive(Debug, Default, Deserialize)]
struct RawDetection {
    p_detect: Option<f64>,
    tau: Option<f64>,
    eta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
struct RawPrior {
    mu: Option<f64>,
    var: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
struct RawLikelihood {
    alpha: Option<f64>,
    beta: Option<f64>,
    var_d: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
struct RawLimits {
    k_max: Option<usize>,
    b_max: Option<f64>,
    v_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
struct RawAnalyze {
    input: Option<String>,
    bins_per_decade: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
struct RawKernelTable {
    d_max: Option<usize>,
}

struct Check<'a> {
    problems: &'a mut Vec<String>,
}

impl<'a> Check<'a> {
    fn require<T: Copy>(&mut self, field: &str, value: Option<T>) -> Option<T> {
        if value.is_none() {
            self.problems
                .push(format!("missing required field `{field}`"));
        }
        value
    }

    fn require_clone<T: Clone>(&mut self, field: &str, value: &Option<T>) -> Option<T> {
        if value.is_none() {
            self.problems
                .push(format!("missing required field `{field}`"));
        }
        value.clone()
    }

    fn positive(&mut self, field: &str, value: f64) -> f64 {
        if !(value > 0.0) || !value.is_finite() {
            self.problems.push(format!(
                "`{field}` must be positive and finite, got {value}"
            ));
        }
        value
    }

    fn non_negative(&mut self, field: &str, value: f64) -> f64 {
        if !(value >= 0.0) || !value.is_finite() {
            self.problems
                .push(format!("`{field}` must be >= 0 and finite, got {value}"));
        }
        value
    }
}

fn resolve_growth(raw: RawGrowth, problems: &mut Vec<String>) -> Option<GrowthSection> {
    let mut check = Check { problems };
    let n_final = check.require("growth.n_final", raw.n_final);
    let m_links = raw.m_links.unwrap_or(1);
    let seed_nodes = raw.seed_nodes.unwrap_or(3);
    let kernel = match raw.kernel {
        None => Some(KernelChoice::LinearBa),
        Some(Value::String(name)) => match name.as_str() {
            "linear-ba" => Some(KernelChoice::LinearBa),
            "mechanistic" => Some(KernelChoice::Mechanistic),
            other => {
                problems.push(format!(
                    "`growth.kernel` must be \"linear-ba\", \"mechanistic\" or an object \
                     {{\"phenomenological\": {{...}}}}, got \"{other}\""
                ));
                None
            }
        },
        Some(Value::Object(map)) => match map.get("phenomenological") {
            Some(inner) => {
                let raw_phen: BTreeMap<String, f64> =
                    serde_json::from_value(inner.clone()).unwrap_or_default();
                let mut check = Check { problems };
                let d_noise = check.require(
                    "growth.kernel.phenomenological.d_noise",
                    raw_phen.get("d_noise").copied(),
                );
                let k_star = check.require(
                    "growth.kernel.phenomenological.k_star",
                    raw_phen.get("k_star").copied(),
                );
                let nu = check.require(
                    "growth.kernel.phenomenological.nu",
                    raw_phen.get("nu").copied(),
                );
                match (d_noise, k_star, nu) {
                    (Some(d_noise), Some(k_star), Some(nu)) => {
                        let decay_s = raw_phen
                            .get("decay_s")
                            .copied()
                            .unwrap_or_else(|| default_decay_s(k_star));
                        if d_noise >= k_star {
                            problems.push(format!(
                                "`growth.kernel.phenomenological`: d_noise ({d_noise}) must lie \
                                 below k_star ({k_star})"
                            ));
                        }
                        if !(d_noise > 0.0) {
                            problems.push(format!(
                                "`growth.kernel.phenomenological.d_noise` must be positive, got {d_noise}"
                            ));
                        }
                        if !(nu > 0.0) || !nu.is_finite() {
                            problems.push(format!(
                                "`growth.kernel.phenomenological.nu` must be positive and finite, got {nu}"
                            ));
                        }
                        if !(decay_s > 0.0) {
                            problems.push(format!(
                                "`growth.kernel.phenomenological.decay_s` must be positive, got {decay_s}"
                            ));
                        }
                        Some(KernelChoice::Phenomenological(PhenomenologicalParams {
                            d_noise,
                            k_star,
                            nu,
                            decay_s,
                        }))
                    }
                    _ => None,
                }
            }
            None => {
                problems.push(
                    "`growth.kernel` object must contain the key `phenomenological`".to_string(),
                );
                None
            }
        },
        Some(other) => {
            problems.push(format!(
                "`growth.kernel` has unsupported JSON type: {other}"
            ));
            None
        }
    };

    if m_links < 1 {
        problems.push("`growth.m_links` must be >= 1".to_string());
    }
    if seed_nodes < 3 {
        problems.push(format!(
            "`growth.seed_nodes` must be >= 3 to form a seed ring, got {seed_nodes}"
        ));
    }
    if seed_nodes < m_links {
        problems.push(format!(
            "`growth.seed_nodes` ({seed_nodes}) must be >= `growth.m_links` ({m_links})"
        ));
    }
    if let Some(n_final) = n_final {
        if n_final < seed_nodes {
            problems.push(format!(
                "`growth.n_final` ({n_final}) must be >= `growth.seed_nodes` ({seed_nodes})"
            ));
        }
    }
    Some(GrowthSection {
        n_final: n_final?,
        m_links,
        seed_nodes,
        kernel: kernel?,
    })
}

fn resolve_kernel_spec(
    raw: RawKernelSpec,
    problems: &mut Vec<String>,
) -> Option<KernelSpecSection> {
    let mut check = Check { problems };
    let alpha = check.require("kernel_spec.alpha", raw.alpha);
    let var_d = check.require("kernel_spec.var_d", raw.var_d);
    let prior_var = check.require("kernel_spec.prior_var", raw.prior_var);
    let k_max = check.require("kernel_spec.k_max", raw.k_max);
    let v_max = check.require("kernel_spec.v_max", raw.v_max);
    let eta = check.require("kernel_spec.eta", raw.eta);
    let (alpha, var_d, prior_var, k_max, v_max, eta) =
        (alpha?, var_d?, prior_var?, k_max?, v_max?, eta?);

    let mut check = Check { problems };
    check.positive("kernel_spec.var_d", var_d);
    check.positive("kernel_spec.prior_var", prior_var);
    check.positive("kernel_spec.v_max", v_max);
    check.positive("kernel_spec.eta", eta);
    if alpha == 0.0 {
        check
            .problems
            .push("`kernel_spec.alpha` must be nonzero (scales diverge at alpha = 0)".to_string());
    }
    if k_max == 0 {
        check
            .problems
            .push("`kernel_spec.k_max` must be >= 1".to_string());
    }

    let beta = raw.beta.unwrap_or(0.0);
    let prior_mu = raw.prior_mu.unwrap_or(0.0);
    let gain = check.positive("kernel_spec.gain", raw.gain.unwrap_or(1.0));
    // default belief cap sigma_pi / alpha: the identification under which the
    // compact and expanded forms of d_belief agree
    let b_max = raw.b_max.unwrap_or_else(|| prior_var.sqrt() / alpha.abs());
    check.positive("kernel_spec.b_max", b_max);
    // detection-time exponent default 4: T_det ∝ snr⁻² with snr = αd/η
    let beta_det = check.non_negative("kernel_spec.beta_det", raw.beta_det.unwrap_or(4.0));
    let l_char = check.positive("kernel_spec.l_char", raw.l_char.unwrap_or(1.0));
    let t0 = check.non_negative("kernel_spec.t0", raw.t0.unwrap_or(1.0));
    if !check.problems.is_empty() {
        return None;
    }

    let mut section = KernelSpecSection {
        alpha,
        beta,
        var_d,
        prior_mu,
        prior_var,
        k_max,
        b_max,
        v_max,
        gain,
        eta,
        beta_det,
        l_char,
        t0,
        decay_s: raw.decay_s.unwrap_or(0.0),
        nu: raw.nu.unwrap_or(0.0),
    };
    let spec = section.to_kernel_spec();
    match characteristic_scales(&spec) {
        Ok(scales) => {
            if raw.decay_s.is_none() {
                section.decay_s = default_decay_s(scales.k_star);
            }
            if raw.nu.is_none() {
                // measured mid-window exponent of the mechanistic kernel
                match default_nu(&section.to_kernel_spec()) {
                    Ok(nu) => section.nu = nu,
                    Err(e) => {
                        problems.push(format!("cannot derive default `kernel_spec.nu`: {e}"));
                        return None;
                    }
                }
            }
        }
        Err(e) => {
            problems.push(format!("kernel_spec is degenerate: {e}"));
            return None;
        }
    }
    if !(section.decay_s > 0.0) {
        problems.push(format!(
            "`kernel_spec.decay_s` must be positive, got {}",
            section.decay_s
        ));
        return None;
    }
    if !(section.nu > 0.0) || !section.nu.is_finite() {
        problems.push(format!(
            "`kernel_spec.nu` must be positive and finite, got {}",
            section.nu
        ));
        return None;
    }
    Some(section)
}

fn resolve_simulate(raw: RawSimulate, problems: &mut Vec<String>) -> Option<SimulateSection> {
    // pairwise checks that only need the fields actually present, so a
    // missing field elsewhere does not hide these violations
    if let (Some(link), Some(sense)) = (raw.link_range, raw.sense_range) {
        if link > sense {
            problems.push(format!(
                "`simulate.link_range` ({link}) must not exceed `simulate.sense_range` ({sense})"
            ));
        }
    }
    if let (Some(sense), Some(length)) = (raw.sense_range, raw.domain_length) {
        if !(sense < length / 2.0) {
            problems.push(format!(
                "`simulate.sense_range` ({sense}) must be below half of \
                 `simulate.domain_length` ({length})"
            ));
        }
    }
    if let Some(dt) = raw.dt {
        if !(dt > 0.0) {
            problems.push(format!("`simulate.dt` must be positive, got {dt}"));
        }
    }
    if let Some(length) = raw.domain_length {
        if !(length > 0.0) {
            problems.push(format!(
                "`simulate.domain_length` must be positive, got {length}"
            ));
        }
    }
    if let Some(link) = raw.link_range {
        if !(link > 0.0) {
            problems.push(format!(
                "`simulate.link_range` must be positive, got {link}"
            ));
        }
    }
    if let Some(rate) = raw.arrival_rate {
        if !(rate >= 0.0) {
            problems.push(format!("`simulate.arrival_rate` must be >= 0, got {rate}"));
        }
    }
    if let Some(gain) = raw.gain {
        if !(gain > 0.0) {
            problems.push(format!("`simulate.gain` must be positive, got {gain}"));
        }
    }
    if raw.snapshot_every == Some(0) {
        problems.push("`simulate.snapshot_every` must be >= 1".to_string());
    }

    let mut check = Check { problems };
    let domain_length = check.require("simulate.domain_length", raw.domain_length);
    let sense_range = check.require("simulate.sense_range", raw.sense_range);
    let link_range = check.require("simulate.link_range", raw.link_range);
    let n_initial = check.require("simulate.n_initial", raw.n_initial);
    let n_steps = check.require("simulate.n_steps", raw.n_steps);

    let detection = raw.detection.unwrap_or_default();
    let p_detect = check.require("simulate.detection.p_detect", detection.p_detect);
    let prior = raw.prior.unwrap_or_default();
    let prior_var = check.require("simulate.prior.var", prior.var);
    let likelihood = raw.likelihood.unwrap_or_default();
    let lik_alpha = check.require("simulate.likelihood.alpha", likelihood.alpha);
    let lik_var_d = check.require("simulate.likelihood.var_d", likelihood.var_d);
    let limits = raw.limits.unwrap_or_default();
    let k_max = check.require("simulate.limits.k_max", limits.k_max);
    let v_max = check.require("simulate.limits.v_max", limits.v_max);

    let (domain_length, sense_range, link_range, n_initial, n_steps) = (
        domain_length?,
        sense_range?,
        link_range?,
        n_initial?,
        n_steps?,
    );
    let (p_detect, prior_var, lik_alpha, lik_var_d, k_max, v_max) = (
        p_detect?, prior_var?, lik_alpha?, lik_var_d?, k_max?, v_max?,
    );

    let dt = raw.dt.unwrap_or(0.1);
    let tau = detection.tau.unwrap_or(1.0);
    // default noise scale: binomial sd of a 10-neighbour reference scene
    let eta = detection
        .eta
        .unwrap_or_else(|| DetectionParams::default_eta(p_detect, tau));
    let prior_mu = prior.mu.unwrap_or(0.0);
    let lik_beta = likelihood.beta.unwrap_or(0.0);
    let b_max = match limits.b_max {
        Some(b) => b,
        None if lik_alpha != 0.0 => prior_var.sqrt() / lik_alpha.abs(),
        None => {
            problems.push(
                "`simulate.limits.b_max` is required when `simulate.likelihood.alpha` is 0 \
                 (the default b_max = sigma_pi/alpha is undefined)"
                    .to_string(),
            );
            return None;
        }
    };

    let update_order = raw
        .update_order
        .unwrap_or_else(|| "synchronous".to_string());
    if update_order != "synchronous" && update_order != "sequential" {
        problems.push(format!(
            "`simulate.update_order` must be \"synchronous\" or \"sequential\", got \"{update_order}\""
        ));
    }
    let placement = match raw.placement {
        None => PlacementChoice::Uniform,
        Some(Value::String(s)) if s == "uniform" => PlacementChoice::Uniform,
        Some(Value::String(s)) => {
            problems.push(format!(
                "`simulate.placement` must be \"uniform\" or {{\"clustered\": {{\"width\": ...}}}}, got \"{s}\""
            ));
            PlacementChoice::Uniform
        }
        Some(Value::Object(map)) => match map.get("clustered").and_then(|c| c.get("width")) {
            Some(w) => match w.as_f64() {
                Some(width) => PlacementChoice::Clustered { width },
                None => {
                    problems.push("`simulate.placement.clustered.width` must be a number".into());
                    PlacementChoice::Uniform
                }
            },
            None => {
                problems.push(
                    "`simulate.placement` object must be {\"clustered\": {\"width\": ...}}".into(),
                );
                PlacementChoice::Uniform
            }
        },
        Some(other) => {
            problems.push(format!(
                "`simulate.placement` has unsupported JSON type: {other}"
            ));
            PlacementChoice::Uniform
        }
    };

    let section = SimulateSection {
        domain_length,
        sense_range,
        link_range,
        dt,
        n_initial,
        n_steps,
        snapshot_every: raw.snapshot_every.unwrap_or(1),
        arrival_rate: raw.arrival_rate.unwrap_or(0.0),
        gain: raw.gain.unwrap_or(1.0),
        update_order,
        placement,
        detection: DetectionSection { p_detect, tau, eta },
        prior: PriorSection {
            mu: prior_mu,
            var: prior_var,
        },
        likelihood: LikelihoodSection {
            alpha: lik_alpha,
            beta: lik_beta,
            var_d: lik_var_d,
        },
        limits: LimitsSection {
            k_max,
            b_max,
            v_max,
        },
    };

    if !(p_detect > 0.0 && p_detect <= 1.0) {
        problems.push(format!(
            "`simulate.detection.p_detect` must lie in (0, 1], got {p_detect}"
        ));
    }
    if !(prior_var > 0.0) {
        problems.push(format!(
            "`simulate.prior.var` must be positive, got {prior_var}"
        ));
    }
    if !(lik_var_d > 0.0) {
        problems.push(format!(
            "`simulate.likelihood.var_d` must be positive, got {lik_var_d}"
        ));
    }
    if let PlacementChoice::Clustered { width } = section.placement {
        if !(width > 0.0 && width <= domain_length) {
            problems.push(format!(
                "`simulate.placement.clustered.width` ({width}) must lie in (0, domain_length]"
            ));
        }
    }
    Some(section)
}

/// Parse and fully validate a config file. `mode_hint` is the CLI subcommand;
/// it must agree with the file's `mode` when both are present.
pub fn parse_config(path: &Path, mode_hint: Option<Mode>) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text, mode_hint)
}

pub fn parse_config_str(
    text: &str,
    mode_hint: Option<Mode>,
) -> Result<ExperimentConfig, ConfigError> {
    let value: Value = serde_json::from_str(text)?;
    let mut problems = Vec::new();
    check_keys(&value, "", &mut problems);

    let raw: RawConfig = match serde_json::from_value(value) {
        Ok(raw) => raw,
        Err(e) => {
            problems.push(format!("structural error: {e}"));
            return Err(ConfigError::Validation(problems));
        }
    };

    let mode = match (raw.mode, mode_hint) {
        (Some(m), Some(h)) if m != h => {
            problems.push(format!(
                "config `mode` is \"{m}\" but the CLI subcommand is \"{h}\""
            ));
            m
        }
        (Some(m), _) => m,
        (None, Some(h)) => h,
        (None, None) => {
            problems.push("missing required field `mode`".to_string());
            return Err(ConfigError::Validation(problems));
        }
    };

    let growth = raw.growth.map(|g| resolve_growth(g, &mut problems));
    let kernel_spec = raw
        .kernel_spec
        .map(|k| resolve_kernel_spec(k, &mut problems));
    let simulate = raw.simulate.map(|s| resolve_simulate(s, &mut problems));
    let analyze = raw.analyze.map(|a| {
        let mut check = Check {
            problems: &mut problems,
        };
        let input = check.require_clone("analyze.input", &a.input);
        input.map(|input| AnalyzeSection {
            input,
            bins_per_decade: a.bins_per_decade.unwrap_or(10),
        })
    });
    let kernel_table = raw.kernel_table.map(|t| KernelTableSection {
        d_max: t.d_max.unwrap_or(0),
    });

    // mode-specific required sections
    match mode {
        Mode::Grow | Mode::GrowBa => {
            if growth.is_none() {
                problems.push("`growth` section is required for grow runs".to_string());
            }
            if matches!(
                growth,
                Some(Some(GrowthSection {
                    kernel: KernelChoice::Mechanistic,
                    ..
                }))
            ) && kernel_spec.is_none()
            {
                problems.push(
                    "`kernel_spec` section is required when growth.kernel is \"mechanistic\""
                        .to_string(),
                );
            }
        }
        Mode::Simulate => {
            if simulate.is_none() {
                problems.push("`simulate` section is required for simulate runs".to_string());
            }
        }
        Mode::Analyze => {
            if analyze.is_none() {
                problems.push("`analyze` section is required for analyze runs".to_string());
            }
        }
        Mode::KernelTable => {
            if kernel_spec.is_none() {
                problems
                    .push("`kernel_spec` section is required for kernel-table runs".to_string());
            }
        }
        Mode::Sweep => {
            if raw.sweep.is_none() {
                problems.push("`sweep` section is required for sweep runs".to_string());
            }
            if growth.is_none() {
                problems.push(
                    "`growth` section is required for sweep runs (sweeps run growth)".to_string(),
                );
            }
        }
    }
    if let Some(sweep) = &raw.sweep {
        if sweep.values.is_empty() {
            problems.push("`sweep.values` must not be empty".to_string());
        }
        if sweep.parameter.is_empty() {
            problems.push("`sweep.parameter` must not be empty".to_string());
        }
    }

    let replicates = raw.replicates.unwrap_or(1);
    if replicates < 1 {
        problems.push("`replicates` must be >= 1".to_string());
    }
    let parallelism = raw.parallelism.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    if parallelism < 1 {
        problems.push("`parallelism` must be >= 1".to_string());
    }

    // kernel-table default d_max: four times k_star, one decade past the knee
    let kernel_table = match (kernel_table, mode) {
        (Some(t), _) if t.d_max > 0 => Some(t),
        (Some(_), _) | (None, Mode::KernelTable) => {
            let d_max = kernel_spec
                .as_ref()
                .and_then(|s| s.as_ref())
                .and_then(|s| characteristic_scales(&s.to_kernel_spec()).ok())
                .map(|scales| (4.0 * scales.k_star).ceil() as usize)
                .unwrap_or(200);
            Some(KernelTableSection { d_max })
        }
        (None, _) => None,
    };

    if !problems.is_empty() {
        return Err(ConfigError::Validation(problems));
    }

    Ok(ExperimentConfig {
        mode,
        out_dir: raw.out_dir.unwrap_or_else(|| format!("runs/{mode}")),
        seed: raw.seed.unwrap_or(0),
        replicates,
        parallelism,
        growth: growth.flatten(),
        kernel_spec: kernel_spec.flatten(),
        simulate: simulate.flatten(),
        analyze: analyze.flatten(),
        kernel_table,
        sweep: raw.sweep,
    })
}

/// Set a dotted-path key inside a JSON value, creating objects along the way.
/// Used by sweeps to materialize one config per swept value.
pub fn set_dotted(value: &mut Value, path: &str, new_value: Value) -> Result<(), String> {
    let mut current = value;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let map = current
            .as_object_mut()
            .ok_or_else(|| format!("`{}` is not an object", parts[..i].join(".")))?;
        if i + 1 == parts.len() {
            map.insert(part.to_string(), new_value);
            return Ok(());
        }
        current = map
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(serde_json::Map::new()));
    }
    Err("empty sweep parameter path".to_string())
}
