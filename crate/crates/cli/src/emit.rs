//! Writers for every artifact the harness emits. Primary outputs (edge
//! lists, CSVs, fit reports) are byte-deterministic under a fixed config and
//! seed; sidecars additionally carry wall-clock times.

use crate::config::KernelSpecSection;
use crate::run::RunRecord;
use fepnet_core::kernel::{
    characteristic_scales, classify_regime, local_log_slope, mechanistic_kernel,
    phenomenological_kernel,
};
use fepnet_core::netstats::{ccdf, DegreeHistogram, TailFit};
use fepnet_core::spatial::Snapshot;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(bytes)
}

/// analysis.csv: one row per observed degree.
pub fn analysis_csv(hist: &DegreeHistogram) -> String {
    let mut out = String::from("k,count,ccdf\n");
    let ccdf_points = ccdf(hist);
    for ((k, count), (_, p)) in hist.iter().zip(ccdf_points) {
        out.push_str(&format!("{k},{count},{p}\n"));
    }
    out
}

/// clusters.csv across snapshots: cluster-size histogram per time index.
pub fn clusters_csv(snapshots: &[Snapshot]) -> String {
    let mut out = String::from("t,size,count\n");
    for snap in snapshots {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &size in &snap.cluster_sizes {
            *counts.entry(size).or_insert(0) += 1;
        }
        for (size, count) in counts {
            out.push_str(&format!("{},{size},{count}\n", snap.time));
        }
    }
    out
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    /// The family with the lower KS distance on the shared tail.
    pub model: String,
    pub power_law: PowerLawReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponential: Option<ExponentialReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_knee: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct PowerLawReport {
    pub gamma_deg: f64,
    pub k_min: usize,
    pub ks: f64,
    pub log_likelihood: f64,
}

#[derive(Debug, Serialize)]
pub struct ExponentialReport {
    pub rate: f64,
    pub k_from: usize,
    pub ks: f64,
    pub log_likelihood: f64,
}

impl FitReport {
    pub fn build(
        power: &TailFit,
        exponential: Option<&TailFit>,
        knee: Option<(usize, f64)>,
    ) -> Self {
        let model = match exponential {
            Some(exp) if exp.ks < power.ks => "exponential",
            _ => "power-law",
        };
        FitReport {
            model: model.to_string(),
            power_law: PowerLawReport {
                gamma_deg: power.parameter,
                k_min: power.k_min,
                ks: power.ks,
                log_likelihood: power.log_likelihood,
            },
            exponential: exponential.map(|exp| ExponentialReport {
                rate: exp.parameter,
                k_from: exp.k_min,
                ks: exp.ks,
                log_likelihood: exp.log_likelihood,
            }),
            k_knee: knee.map(|(k, _)| k),
            confidence: knee.map(|(_, c)| c),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("fit report serializes");
        text.push('\n');
        text
    }
}

/// kernel_table.csv: both kernels side by side with regime and the local
/// exponent of the mechanistic kernel.
pub fn kernel_table_csv(section: &KernelSpecSection, d_max: usize) -> Result<String, String> {
    let spec = section.to_kernel_spec();
    let scales = characteristic_scales(&spec).map_err(|e| e.to_string())?;
    let mut out = String::from("d,mechanistic,phenomenological,regime,local_slope\n");
    for d in 1..=d_max {
        let mech = mechanistic_kernel(d, &spec);
        let phen = phenomenological_kernel(d, &scales, &spec).map_err(|e| e.to_string())?;
        let regime = classify_regime(d, &scales).map_err(|e| e.to_string())?;
        let slope = if d >= 2 {
            local_log_slope(|k| mechanistic_kernel(k, &spec), d)
                .map(|s| s.to_string())
                .unwrap_or_default()
        } else {
            String::new()
        };
        out.push_str(&format!("{d},{mech},{phen},{},{slope}\n", regime.as_str()));
    }
    Ok(out)
}

/// summary.csv across runs: swept parameters (union of keys, blank when a
/// run did not sweep that key) followed by the fixed metric columns.
pub fn summary_csv(records: &[RunRecord]) -> Result<String, String> {
    if records.is_empty() {
        return Err("cannot summarize an empty record list".to_string());
    }
    let mut swept_keys: Vec<String> = records
        .iter()
        .flat_map(|r| r.swept.keys().cloned())
        .collect();
    swept_keys.sort();
    swept_keys.dedup();

    let mut out = String::new();
    for key in &swept_keys {
        out.push_str(key);
        out.push(',');
    }
    out.push_str("gamma_deg,k_knee,knee_confidence,min_degree_fraction,ks_vs_ba\n");
    for record in records {
        for key in &swept_keys {
            if let Some(value) = record.swept.get(key) {
                out.push_str(&value.to_string());
            }
            out.push(',');
        }
        match &record.metrics {
            Some(m) => {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    m.gamma_deg,
                    m.k_knee.map(|k| k.to_string()).unwrap_or_default(),
                    m.knee_confidence.map(|c| c.to_string()).unwrap_or_default(),
                    m.min_degree_fraction,
                    m.ks_vs_ba.map(|k| k.to_string()).unwrap_or_default(),
                ));
            }
            None => out.push_str(",,,,\n"),
        }
    }
    Ok(out)
}
