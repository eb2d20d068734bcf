//! Experiment orchestration: replicate fan-out, sweeps, and the run record.
//!
//! Seed discipline: replicate r of a run draws its stream from
//! `master_seed XOR r`; sweep point i shifts the master by `i << 32` so
//! point-level and replicate-level indices can never collide. Identical
//! config and seed reproduce every primary output byte for byte.

use crate::config::{
    emit_config, parse_config_str, ExperimentConfig, KernelChoice, Mode, SweepSection,
};
use crate::emit;
use fepnet_core::graphio;
use fepnet_core::growth::{grow, grow_ba, Graph, GrowthConfig};
use fepnet_core::kernel::{
    characteristic_scales, mechanistic_kernel, phenomenological_from_scales,
};
use fepnet_core::netstats::{
    ccdf, degree_histogram, detect_knee, fit_exponential_tail, fit_power_law, ks_distance,
    DegreeHistogram,
};
use fepnet_core::rng::rng_for_task;
use fepnet_core::spatial;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("replicate {index} (seed {seed}): {message}")]
    Replicate {
        index: usize,
        seed: u64,
        message: String,
    },
    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Failed(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Analysis metrics attached to runs that analyzed a graph.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetrics {
    pub gamma_deg: f64,
    pub power_k_min: usize,
    pub power_ks: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_knee: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub knee_confidence: Option<f64>,
    pub min_degree_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_vs_ba: Option<f64>,
}

/// What a completed run leaves behind: config echo, seed, wall time, and the
/// manifest of files it wrote (paths relative to the run directory).
#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub mode: Mode,
    pub artifact_version: String,
    pub master_seed: u64,
    pub replicates: usize,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub swept: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<RunMetrics>,
    pub config: ExperimentConfig,
}

impl RunRecord {
    fn new(config: &ExperimentConfig) -> Self {
        RunRecord {
            mode: config.mode,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: config.seed,
            replicates: config.replicates,
            wall_time_s: 0.0,
            outputs: Vec::new(),
            swept: BTreeMap::new(),
            metrics: None,
            config: config.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct ReplicateMeta<'a> {
    seed: u64,
    wall_time_s: f64,
    config: &'a ExperimentConfig,
}

/// Run closures over 0..jobs with a bounded worker pool, preserving order.
fn run_indexed<T, F>(jobs: usize, workers: usize, job: F) -> Vec<Result<T, RunError>>
where
    T: Send,
    F: Fn(usize) -> Result<T, RunError> + Sync,
{
    let workers = workers.clamp(1, jobs.max(1));
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<T, RunError>>>> =
        Mutex::new((0..jobs).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::SeqCst);
                if index >= jobs {
                    break;
                }
                let result = job(index);
                results.lock().unwrap()[index] = Some(result);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("job ran"))
        .collect()
}

/// The attachment kernel a growth config asks for.
fn growth_kernel(config: &ExperimentConfig) -> Result<Box<dyn Fn(usize) -> f64 + Sync>, RunError> {
    let growth = config
        .growth
        .as_ref()
        .ok_or_else(|| RunError::Failed("growth section missing".into()))?;
    match (&growth.kernel, config.mode) {
        (_, Mode::GrowBa) | (KernelChoice::LinearBa, _) => Ok(Box::new(|k| k as f64)),
        (KernelChoice::Phenomenological(p), _) => {
            let (d_noise, k_star, nu, decay_s) = (p.d_noise, p.k_star, p.nu, p.decay_s);
            Ok(Box::new(move |k| {
                phenomenological_from_scales(k, d_noise, k_star, nu, decay_s)
            }))
        }
        (KernelChoice::Mechanistic, _) => {
            let section = config
                .kernel_spec
                .as_ref()
                .ok_or_else(|| RunError::Failed("kernel_spec section missing".into()))?;
            let spec = section.to_kernel_spec();
            characteristic_scales(&spec).map_err(|e| RunError::Failed(e.to_string()))?;
            Ok(Box::new(move |k| mechanistic_kernel(k, &spec)))
        }
    }
}

fn analyze_histogram(
    hist: &DegreeHistogram,
    baseline: Option<&DegreeHistogram>,
) -> Result<(RunMetrics, emit::FitReport), RunError> {
    let power = fit_power_law(hist).map_err(|e| RunError::Failed(e.to_string()))?;
    let exponential = fit_exponential_tail(hist, power.k_min).ok();
    let knee = detect_knee(&ccdf(hist)).ok();
    let metrics = RunMetrics {
        gamma_deg: power.parameter,
        power_k_min: power.k_min,
        power_ks: power.ks,
        k_knee: knee.map(|(k, _)| k),
        knee_confidence: knee.map(|(_, c)| c),
        min_degree_fraction: hist.min_degree_fraction(),
        ks_vs_ba: baseline.map(|b| ks_distance(hist, b)),
    };
    let report = emit::FitReport::build(&power, exponential.as_ref(), knee);
    Ok((metrics, report))
}

fn grow_one(config: &ExperimentConfig, seed: u64) -> Result<Graph, String> {
    let growth = config.growth.as_ref().ok_or("growth section missing")?;
    let gc = GrowthConfig {
        n_final: growth.n_final,
        m_links: growth.m_links,
        seed_nodes: growth.seed_nodes,
    };
    let kernel = growth_kernel(config).map_err(|e| e.to_string())?;
    let mut rng = rng_for_task(seed, 0);
    grow(&gc, &*kernel, &mut rng).map_err(|e| e.to_string())
}

fn run_growth(config: &ExperimentConfig, out_dir: &Path) -> Result<RunRecord, RunError> {
    let mut record = RunRecord::new(config);
    let results = run_indexed(config.replicates, config.parallelism, |index| {
        let seed = config.seed ^ index as u64;
        let started = Instant::now();
        let graph = grow_one(config, seed).map_err(|message| RunError::Replicate {
            index,
            seed,
            message,
        })?;

        let rep_dir = out_dir.join(format!("rep_{index:03}"));
        let edges_path = rep_dir.join("edges.txt");
        let mut buffer = Vec::new();
        graphio::write_edge_list(&graph, &mut buffer).map_err(io_err(&edges_path))?;
        emit::write_file(&edges_path, &buffer).map_err(io_err(&edges_path))?;

        let meta = ReplicateMeta {
            seed,
            wall_time_s: started.elapsed().as_secs_f64(),
            config,
        };
        let meta_path = rep_dir.join("meta.json");
        emit::write_file(
            &meta_path,
            serde_json::to_string_pretty(&meta).unwrap().as_bytes(),
        )
        .map_err(io_err(&meta_path))?;
        Ok(vec![
            format!("rep_{index:03}/edges.txt"),
            format!("rep_{index:03}/meta.json"),
        ])
    });
    for result in results {
        record.outputs.extend(result?);
    }
    Ok(record)
}

fn run_simulate(config: &ExperimentConfig, out_dir: &Path) -> Result<RunRecord, RunError> {
    let mut record = RunRecord::new(config);
    let base_world = config
        .world_config()
        .map_err(|e| RunError::Failed(e.to_string()))?;
    let results = run_indexed(config.replicates, config.parallelism, |index| {
        let seed = config.seed ^ index as u64;
        let started = Instant::now();
        let mut world_config = base_world.clone();
        world_config.seed = seed;
        let snapshots = spatial::run(&world_config).map_err(|e| RunError::Replicate {
            index,
            seed,
            message: e.to_string(),
        })?;

        let rep_dir = out_dir.join(format!("rep_{index:03}"));
        let mut outputs = Vec::new();
        for snapshot in &snapshots {
            let name = format!("snapshots/snap_{:06}.edges", snapshot.time);
            let path = rep_dir.join(&name);
            let mut buffer = Vec::new();
            graphio::write_edges(&snapshot.edges, &mut buffer).map_err(io_err(&path))?;
            emit::write_file(&path, &buffer).map_err(io_err(&path))?;
            outputs.push(format!("rep_{index:03}/{name}"));
        }
        let clusters_path = rep_dir.join("clusters.csv");
        emit::write_file(&clusters_path, emit::clusters_csv(&snapshots).as_bytes())
            .map_err(io_err(&clusters_path))?;
        outputs.push(format!("rep_{index:03}/clusters.csv"));

        let meta = ReplicateMeta {
            seed,
            wall_time_s: started.elapsed().as_secs_f64(),
            config,
        };
        let meta_path = rep_dir.join("meta.json");
        emit::write_file(
            &meta_path,
            serde_json::to_string_pretty(&meta).unwrap().as_bytes(),
        )
        .map_err(io_err(&meta_path))?;
        outputs.push(format!("rep_{index:03}/meta.json"));
        Ok(outputs)
    });
    for result in results {
        record.outputs.extend(result?);
    }
    Ok(record)
}

fn run_analyze(config: &ExperimentConfig, out_dir: &Path) -> Result<RunRecord, RunError> {
    let mut record = RunRecord::new(config);
    let section = config
        .analyze
        .as_ref()
        .ok_or_else(|| RunError::Failed("analyze section missing".into()))?;
    let input = Path::new(&section.input);
    let file = std::fs::File::open(input).map_err(io_err(input))?;
    let graph = graphio::read_edge_list(std::io::BufReader::new(file))
        .map_err(|e| RunError::Failed(e.to_string()))?;
    let hist = degree_histogram(&graph).map_err(|e| RunError::Failed(e.to_string()))?;

    let csv_path = out_dir.join("analysis.csv");
    emit::write_file(&csv_path, emit::analysis_csv(&hist).as_bytes()).map_err(io_err(&csv_path))?;
    record.outputs.push("analysis.csv".to_string());

    let (metrics, report) = analyze_histogram(&hist, None)?;
    let report_path = out_dir.join("fit_report.json");
    emit::write_file(&report_path, report.to_json().as_bytes()).map_err(io_err(&report_path))?;
    record.outputs.push("fit_report.json".to_string());
    record.metrics = Some(metrics);
    Ok(record)
}

fn run_kernel_table(config: &ExperimentConfig, out_dir: &Path) -> Result<RunRecord, RunError> {
    let mut record = RunRecord::new(config);
    let section = config
        .kernel_spec
        .as_ref()
        .ok_or_else(|| RunError::Failed("kernel_spec section missing".into()))?;
    let d_max = config.kernel_table.as_ref().map(|t| t.d_max).unwrap_or(200);
    let table = emit::kernel_table_csv(section, d_max).map_err(RunError::Failed)?;
    let path = out_dir.join("kernel_table.csv");
    emit::write_file(&path, table.as_bytes()).map_err(io_err(&path))?;
    record.outputs.push("kernel_table.csv".to_string());
    Ok(record)
}

fn run_sweep(
    config: &ExperimentConfig,
    raw_text: &str,
    out_dir: &Path,
) -> Result<RunRecord, RunError> {
    let mut record = RunRecord::new(config);
    let sweep: SweepSection = config
        .sweep
        .clone()
        .ok_or_else(|| RunError::Failed("sweep section missing".into()))?;

    let mut point_records = Vec::new();
    for (point, value) in sweep.values.iter().enumerate() {
        // materialize the point config from the raw text so every derived
        // default is re-resolved under the swept value
        let mut raw: serde_json::Value =
            serde_json::from_str(raw_text).map_err(|e| RunError::Failed(e.to_string()))?;
        if let Some(map) = raw.as_object_mut() {
            map.remove("sweep");
            map.insert("mode".into(), serde_json::Value::from("grow"));
        }
        crate::config::set_dotted(&mut raw, &sweep.parameter, value.clone())
            .map_err(RunError::Failed)?;
        let mut point_config = parse_config_str(&raw.to_string(), Some(Mode::Grow))
            .map_err(|e| RunError::Failed(format!("sweep point {point} ({value}): {e}")))?;
        point_config.seed = config.seed ^ ((point as u64) << 32);
        point_config.parallelism = config.parallelism;

        let point_dir_name = format!("point_{point:02}");
        let point_dir = out_dir.join(&point_dir_name);
        let mut point_record = run_growth(&point_config, &point_dir)?;
        point_record
            .swept
            .insert(sweep.parameter.clone(), value.clone());

        // analyze replicate 0 against a BA baseline grown at the same n, m
        // and the same stream
        let rep0_seed = point_config.seed;
        let graph = grow_one(&point_config, rep0_seed).map_err(|message| RunError::Replicate {
            index: 0,
            seed: rep0_seed,
            message,
        })?;
        let hist = degree_histogram(&graph).map_err(|e| RunError::Failed(e.to_string()))?;
        let growth = point_config
            .growth
            .as_ref()
            .expect("growth present in sweep");
        let gc = GrowthConfig {
            n_final: growth.n_final,
            m_links: growth.m_links,
            seed_nodes: growth.seed_nodes,
        };
        let mut rng = rng_for_task(rep0_seed, 0);
        let baseline = grow_ba(&gc, &mut rng).map_err(|e| RunError::Failed(e.to_string()))?;
        let baseline_hist =
            degree_histogram(&baseline).map_err(|e| RunError::Failed(e.to_string()))?;

        let (metrics, report) = analyze_histogram(&hist, Some(&baseline_hist))?;
        let report_path = point_dir.join("fit_report.json");
        emit::write_file(&report_path, report.to_json().as_bytes())
            .map_err(io_err(&report_path))?;
        point_record.outputs.push("fit_report.json".to_string());
        point_record.metrics = Some(metrics);

        let point_rec_path = point_dir.join("run_record.json");
        emit::write_file(
            &point_rec_path,
            serde_json::to_string_pretty(&point_record)
                .unwrap()
                .as_bytes(),
        )
        .map_err(io_err(&point_rec_path))?;

        for output in &point_record.outputs {
            record.outputs.push(format!("{point_dir_name}/{output}"));
        }
        record
            .outputs
            .push(format!("{point_dir_name}/run_record.json"));
        point_records.push(point_record);
    }

    let summary = emit::summary_csv(&point_records).map_err(RunError::Failed)?;
    let summary_path = out_dir.join("summary.csv");
    emit::write_file(&summary_path, summary.as_bytes()).map_err(io_err(&summary_path))?;
    record.outputs.push("summary.csv".to_string());
    Ok(record)
}

/// Summarize a set of already-completed run records into a CSV.
pub fn emit_summary(records: &[RunRecord]) -> Result<String, RunError> {
    emit::summary_csv(records).map_err(RunError::Failed)
}

/// Execute a fully validated config. `raw_text` is the original config text,
/// used by sweeps to materialize per-point configs.
pub fn run_experiment(
    config: &ExperimentConfig,
    raw_text: &str,
    out_dir: &Path,
) -> Result<RunRecord, RunError> {
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let started = Instant::now();
    let mut record = match config.mode {
        Mode::Grow | Mode::GrowBa => run_growth(config, out_dir)?,
        Mode::Simulate => run_simulate(config, out_dir)?,
        Mode::Analyze => run_analyze(config, out_dir)?,
        Mode::KernelTable => run_kernel_table(config, out_dir)?,
        Mode::Sweep => run_sweep(config, raw_text, out_dir)?,
    };
    record.wall_time_s = started.elapsed().as_secs_f64();

    let config_path = out_dir.join("config.resolved.json");
    emit::write_file(&config_path, emit_config(config).as_bytes()).map_err(io_err(&config_path))?;
    record.outputs.push("config.resolved.json".to_string());

    let record_path = out_dir.join("run_record.json");
    emit::write_file(
        &record_path,
        serde_json::to_string_pretty(&record).unwrap().as_bytes(),
    )
    .map_err(io_err(&record_path))?;

    // the manifest must only list files that exist
    for output in &record.outputs {
        let path = out_dir.join(output);
        if !path.exists() {
            return Err(RunError::Failed(format!(
                "manifest entry {} was not written",
                path.display()
            )));
        }
    }
    Ok(record)
}

/// Resolve the output directory: CLI override, then config.
pub fn resolve_out_dir(config: &ExperimentConfig, cli_out: Option<&Path>) -> PathBuf {
    cli_out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&config.out_dir))
}
