//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture` to
//! see the lines for passing criteria; failing criteria print them in the
//! captured output).

mod support;

use fepnet_core::belief::*;
use fepnet_core::detection::{sample_detection_statistic, ClusterScene, DetectionParams};
use fepnet_core::growth::{grow, grow_ba, rate_equation, GrowthConfig};
use fepnet_core::kernel::*;
use fepnet_core::netstats::{ccdf, degree_histogram, detect_knee, fit_power_law, total_variation};
use fepnet_core::rng::{rng_for_task, SimRng};
use fepnet_core::spatial::{
    move_agent, sense, step, update_belief, Agent, InitialPlacement, UpdateOrder, World,
    WorldConfig,
};
use rand::Rng;
use std::time::Instant;
use support::*;

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

struct Draw {
    prior: GaussianBelief,
    q_var: f64,
    lik: LikelihoodModel,
    obs: Observation,
    mu_probe: f64,
}

fn draw_parameters(rng: &mut SimRng) -> Draw {
    Draw {
        prior: GaussianBelief {
            mu: rng.gen_range(-5.0..5.0),
            var: 10f64.powf(rng.gen_range(-2.0..2.0)),
        },
        q_var: 10f64.powf(rng.gen_range(-2.0..2.0)),
        lik: LikelihoodModel {
            alpha: rng.gen_range(-3.0..3.0),
            beta: rng.gen_range(-5.0..5.0),
            var_d: 10f64.powf(rng.gen_range(-2.0..2.0)),
        },
        obs: Observation {
            d_stat: rng.gen_range(-5.0..5.0),
        },
        mu_probe: rng.gen_range(-5.0..5.0),
    }
}

#[test]
fn acceptance_1_closed_form_optimality() {
    let started = Instant::now();
    let mut rng = rng_for_task(0xACC0, 1);
    let mut worst_argmin: f64 = 0.0;
    let mut worst_grad: f64 = 0.0;
    for _ in 0..1000 {
        let d = draw_parameters(&mut rng);
        let f = |mu: f64| {
            free_energy(
                &GaussianBelief { mu, var: d.q_var },
                &d.prior,
                &d.lik,
                &d.obs,
            )
            .unwrap()
        };

        let closed = posterior_mean(&d.prior, &d.lik, &d.obs);
        let numerical = minimize_scalar(f, -1e6, 1e6);
        worst_argmin = worst_argmin.max((closed - numerical).abs());

        let grad = grad_f_mu(d.mu_probe, &d.prior, &d.lik, &d.obs);
        let fd = central_difference(f, d.mu_probe, 1e-3 * d.mu_probe.abs().max(1.0));
        worst_grad = worst_grad.max((fd - grad).abs() / grad.abs().max(1.0));
    }
    let elapsed = started.elapsed().as_secs_f64();
    let ok = worst_argmin < 1e-9 && worst_grad <= 1e-6 && elapsed < 5.0;
    println!(
        "ACCEPTANCE 1 (closed-form optimality): {} — max |argmin gap| {worst_argmin:.2e} \
         (tol 1e-9), max grad rel err {worst_grad:.2e} (tol 1e-6), {elapsed:.2}s (< 5s)",
        verdict(ok)
    );
    assert!(
        ok,
        "argmin gap {worst_argmin}, grad rel err {worst_grad}, elapsed {elapsed}"
    );
}

#[test]
fn acceptance_2_kl_and_nll_oracles() {
    let started = Instant::now();
    let mut rng = rng_for_task(0xACC0, 2);
    let mut worst_kl: f64 = 0.0;
    let mut worst_nll_sigmas: f64 = 0.0;
    for _ in 0..100 {
        let d = draw_parameters(&mut rng);
        let q = GaussianBelief {
            mu: d.mu_probe,
            var: d.q_var,
        };

        let kl = kl_gaussians(&q, &d.prior).unwrap();
        let quad = kl_by_quadrature(q.mu, q.var, d.prior.mu, d.prior.var);
        worst_kl = worst_kl.max((kl - quad).abs());

        let nll = expected_nll(&q, &d.lik, &d.obs);
        let (mc, se) = mc_expected_nll(
            q.mu,
            q.var,
            d.lik.alpha,
            d.lik.beta,
            d.lik.var_d,
            d.obs.d_stat,
            1_000_000,
            &mut rng,
        );
        worst_nll_sigmas = worst_nll_sigmas.max((nll - mc).abs() / se.max(1e-300));
    }
    let elapsed = started.elapsed().as_secs_f64();
    let ok = worst_kl < 1e-8 && worst_nll_sigmas < 3.0 && elapsed < 30.0;
    println!(
        "ACCEPTANCE 2 (KL and expected-NLL oracles): {} — max |KL − quadrature| {worst_kl:.2e} \
         (tol 1e-8), max NLL deviation {worst_nll_sigmas:.2}σ (tol 3σ), {elapsed:.2}s (< 30s)",
        verdict(ok)
    );
    assert!(
        ok,
        "KL gap {worst_kl}, NLL sigmas {worst_nll_sigmas}, elapsed {elapsed}"
    );
}

#[test]
fn acceptance_3_detection_central_limit() {
    let started = Instant::now();
    let tau = 1.0;
    let mut worst_ks: f64 = 0.0;
    let mut task = 30u64;
    for &d in &[30usize, 100] {
        for &p in &[0.3, 0.5, 0.7] {
            let params = DetectionParams {
                p_detect: p,
                tau,
                eta: 1.0,
            };
            let scene = ClusterScene {
                d_right: d,
                d_left: 0,
            };
            let mut rng = rng_for_task(0xACC0, task);
            task += 1;
            let samples: Vec<f64> = (0..10_000)
                .map(|_| sample_detection_statistic(&scene, &params, &mut rng))
                .collect();
            let mu = d as f64 * p / tau;
            let sd = (d as f64 * p * (1.0 - p)).sqrt() / tau;
            worst_ks = worst_ks.max(ks_lattice_vs_normal(&samples, 1.0 / tau, mu, sd));
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let ok = worst_ks < 0.05 && elapsed < 10.0;
    println!(
        "ACCEPTANCE 3 (detection CLT): {} — max KS {worst_ks:.4} over d ∈ {{30,100}}, \
         p ∈ {{0.3,0.5,0.7}} (tol 0.05, lattice-midpoint model CDF), {elapsed:.2}s (< 10s)",
        verdict(ok)
    );
    assert!(ok, "KS {worst_ks}, elapsed {elapsed}");
}

/// Coupling C = 1/2 with every cap at k_star = 100 and d_noise = 5.
fn capped_spec(beta_det: f64) -> KernelSpec {
    KernelSpec {
        lik: LikelihoodModel {
            alpha: 0.5,
            beta: 0.0,
            var_d: 1.0,
        },
        prior: GaussianBelief { mu: 0.0, var: 4.0 },
        limits: AgentLimits {
            k_max: 100,
            b_max: 50.0,
            v_max: 50.0,
        },
        gain: 1.0,
        eta: 2.5,
        beta_det,
        l_char: 1.0,
        t0: 40.0,
        decay_s: 25.0,
        nu: 1.5,
    }
}

#[test]
fn acceptance_4_linear_kernel_recovery() {
    let started = Instant::now();
    let mut spec = capped_spec(0.0);
    spec.t0 = 0.0;
    spec.limits = AgentLimits {
        k_max: usize::MAX,
        b_max: 1e18,
        v_max: 1e18,
    };
    let mut worst: f64 = 0.0;
    for d in 2..=1000usize {
        let slope = local_log_slope(|k| mechanistic_kernel(k, &spec), d).unwrap();
        worst = worst.max((slope - 1.0).abs());
    }
    let elapsed = started.elapsed().as_secs_f64();
    let ok = worst <= 1e-6;
    println!(
        "ACCEPTANCE 4 (linear-kernel recovery): {} — max |slope − 1| {worst:.2e} over \
         d ∈ [2, 10³] (tol 1e-6), {elapsed:.2}s",
        verdict(ok)
    );
    assert!(ok, "max slope deviation {worst}");
}

#[test]
fn acceptance_5_super_linearity_at_beta_det_two() {
    let started = Instant::now();
    // As stated: beta_det = 2, caps at k_star = 100.
    let spec = capped_spec(2.0);
    let scales = characteristic_scales(&spec).unwrap();
    let window = (scales.d_noise.floor() as usize + 1)..(scales.k_star.ceil() as usize);
    let max_slope = window
        .clone()
        .map(|d| local_log_slope(|k| mechanistic_kernel(k, &spec), d).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    let max_tail_slope = (201..=1000usize)
        .map(|d| local_log_slope(|k| mechanistic_kernel(k, &spec), d).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    let part_a = max_slope > 1.05;
    let part_b = max_tail_slope < 0.1;
    let elapsed = started.elapsed().as_secs_f64();
    let ok = part_a && part_b;
    println!(
        "ACCEPTANCE 5 (super-linearity at beta_det = 2): {} — max slope in \
         (d_noise, k_star) = {max_slope:.6} (required > 1.05: {}), max slope beyond 200 = \
         {max_tail_slope:.4} (required < 0.1: {}), {elapsed:.2}s",
        verdict(ok),
        verdict(part_a),
        verdict(part_b),
    );

    // Supplementary diagnostic (not the criterion): at beta_det = 2 both time
    // phases scale exactly as 1/d, so the kernel is exactly linear and the
    // 1.05 threshold is unreachable; any beta_det > 2 compounds the phases.
    // The same criterion evaluated at the snr-consistent exponent 4:
    let spec4 = capped_spec(4.0);
    let max_slope4 = window
        .clone()
        .map(|d| local_log_slope(|k| mechanistic_kernel(k, &spec4), d).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    let max_tail4 = (201..=1000usize)
        .map(|d| local_log_slope(|k| mechanistic_kernel(k, &spec4), d).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    println!(
        "    supplement (same criterion at beta_det = 4): max window slope {max_slope4:.4} \
         (> 1.05: {}), max tail slope {max_tail4:.4} (< 0.1: {})",
        verdict(max_slope4 > 1.05),
        verdict(max_tail4 < 0.1),
    );
    assert!(
        ok,
        "beta_det = 2 yields an exactly linear kernel below the caps (detection and travel \
         times both scale as 1/d, so the local exponent is identically 1 and the 1.05 \
         threshold is algebraically unreachable; any beta_det > 2 compounds the phases — \
         see the supplement line): max window slope {max_slope}, tail slope {max_tail_slope}"
    );
}

#[test]
fn acceptance_6_growth_matches_rate_equation() {
    let started = Instant::now();
    let config = GrowthConfig {
        n_final: 100_000,
        m_links: 1,
        seed_nodes: 3,
    };
    let steps = config.n_final - config.seed_nodes;

    let ba_model = rate_equation(|k| k as f64, 1, 3, steps, 4096).unwrap();
    let uniform_model = rate_equation(|_| 1.0, 1, 3, steps, 256).unwrap();

    let mut tv_ba = Vec::new();
    let mut tv_uniform = Vec::new();
    let mut gammas = Vec::new();
    let mut degree_one = Vec::new();
    for seed in 0..10u64 {
        let graph = grow_ba(&config, &mut rng_for_task(0xACC6, seed)).unwrap();
        let hist = degree_histogram(&graph).unwrap();
        tv_ba.push(total_variation(&hist, &ba_model));
        gammas.push(fit_power_law(&hist).unwrap().parameter);
        degree_one.push(hist.count(1) as f64 / hist.total() as f64);

        let graph = grow(&config, |_| 1.0, &mut rng_for_task(0xACC7, seed)).unwrap();
        let hist = degree_histogram(&graph).unwrap();
        tv_uniform.push(total_variation(&hist, &uniform_model));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let tv_ba_mean = mean(&tv_ba);
    let tv_uniform_mean = mean(&tv_uniform);
    let gamma_mean = mean(&gammas);
    let frac_mean = mean(&degree_one);

    let elapsed = started.elapsed().as_secs_f64();
    let ok = tv_ba_mean < 0.02
        && tv_uniform_mean < 0.02
        && (gamma_mean - 3.0).abs() <= 0.3
        && (frac_mean - 2.0 / 3.0).abs() <= 0.02
        && elapsed < 60.0;
    println!(
        "ACCEPTANCE 6 (growth vs rate-equation oracle): {} — mean TV linear {tv_ba_mean:.4}, \
         uniform {tv_uniform_mean:.4} (tol 0.02, 10 seeds, n = 1e5); BA exponent \
         {gamma_mean:.3} (3.0 ± 0.3); degree-1 fraction {frac_mean:.4} (2/3 ± 0.02); \
         {elapsed:.2}s (< 60s)",
        verdict(ok)
    );
    assert!(
        ok,
        "tv {tv_ba_mean}/{tv_uniform_mean}, gamma {gamma_mean}, frac {frac_mean}, elapsed {elapsed}"
    );
}

#[test]
fn acceptance_7_knee_reproduction_at_pinned_parameters() {
    let started = Instant::now();
    let config = GrowthConfig {
        n_final: 100_000,
        m_links: 1,
        seed_nodes: 3,
    };
    let kernel = |k: usize| phenomenological_from_scales(k, 5.0, 50.0, 1.5, 12.5);

    let mut min_frac_lower = 0usize;
    let mut ccdf_higher = 0usize;
    let mut knee_in_band = 0usize;
    let mut knees = Vec::new();
    let mut confidences = Vec::new();
    for seed in 0..10u64 {
        let phen = grow(&config, kernel, &mut rng_for_task(0xACC8, seed)).unwrap();
        let ba = grow_ba(&config, &mut rng_for_task(0xACC8, seed)).unwrap();
        let phen_hist = degree_histogram(&phen).unwrap();
        let ba_hist = degree_histogram(&ba).unwrap();

        if phen_hist.min_degree_fraction() < ba_hist.min_degree_fraction() {
            min_frac_lower += 1;
        }
        if (5..=50).all(|k| phen_hist.ccdf_at(k) > ba_hist.ccdf_at(k)) {
            ccdf_higher += 1;
        }
        let (k_knee, confidence) = detect_knee(&ccdf(&phen_hist)).unwrap();
        knees.push(k_knee);
        confidences.push((confidence * 1000.0).round() / 1000.0);
        if (40..=60).contains(&k_knee) && confidence > 0.5 {
            knee_in_band += 1;
        }
    }
    let part_a = min_frac_lower >= 9;
    let part_b = ccdf_higher >= 9;
    let part_c = knee_in_band >= 8;
    let elapsed = started.elapsed().as_secs_f64();
    let ok = part_a && part_b && part_c && elapsed < 120.0;
    println!(
        "ACCEPTANCE 7 (knee reproduction at pinned parameters): {} — (a) lower min-degree \
         fraction {min_frac_lower}/10 (need ≥ 9: {}); (b) CCDF higher throughout [5, 50] \
         {ccdf_higher}/10 (need ≥ 9: {}); (c) knee ∈ [40, 60] with confidence > 0.5 \
         {knee_in_band}/10 (need ≥ 8: {}); knees {knees:?}, confidences {confidences:?}; \
         {elapsed:.2}s (< 120s)",
        verdict(ok),
        verdict(part_a),
        verdict(part_b),
        verdict(part_c),
    );
    assert!(
        ok,
        "(a) {min_frac_lower}/10, (b) {ccdf_higher}/10, (c) {knee_in_band}/10 — (b) is \
         empirically reversed for these parameters: the overrepresented band sits at \
         k ∈ [2, 4], just above the minimum degree, and the CCDF lies below the linear-kernel \
         baseline across all of [5, 50] (the mean-field rate equation reproduces the same \
         ratios, so this is a property of the model, not sampling noise); for (c), the \
         two-segment estimator's answer on the noise-free mean-field CCDF is k = 62 with \
         confidence 0.47, outside the required band and threshold even before sampling noise"
    );
}

fn regime_world_config() -> WorldConfig {
    WorldConfig {
        domain_length: 1000.0,
        sense_range: 10.0,
        link_range: 2.0,
        dt: 0.1,
        detection: DetectionParams {
            p_detect: 0.5,
            tau: 1.0,
            eta: 1.0,
        },
        prior: GaussianBelief { mu: 0.0, var: 1.0 },
        lik: LikelihoodModel {
            alpha: 0.5,
            beta: 0.0,
            var_d: 1.0,
        },
        gain: 1.0,
        limits: AgentLimits {
            k_max: 64,
            b_max: 100.0,
            v_max: 10.0,
        },
        arrival_rate: 0.0,
        n_initial: 0,
        n_steps: 0,
        snapshot_every: 1,
        seed: 0,
        update_order: UpdateOrder::Synchronous,
        placement: InitialPlacement::Uniform,
    }
}

fn world_with_positions(config: WorldConfig, positions: &[f64]) -> World {
    let mut rng = rng_for_task(config.seed, 0);
    let mut world = World::new(config, &mut rng).unwrap();
    world.agents = positions
        .iter()
        .map(|&p| Agent {
            position: p,
            belief: world.config.prior,
            last_velocity: 0.0,
        })
        .collect();
    world
}

#[test]
fn acceptance_8_spatial_regime_signatures() {
    let started = Instant::now();

    // noise-dominated: isolated agents, signed velocity centred on zero with
    // nonzero speed
    let config = regime_world_config();
    let positions: Vec<f64> = (0..50).map(|i| 20.0 * i as f64).collect();
    let mut world = world_with_positions(config.clone(), &positions);
    let mut rng = rng_for_task(0xACC9, 0);
    let mut velocities = Vec::new();
    for _ in 0..200 {
        step(&mut world, &mut rng);
        velocities.extend(world.agents.iter().map(|a| a.last_velocity));
    }
    let (signed_mean, signed_se) = mean_and_se(&velocities);
    let speeds: Vec<f64> = velocities.iter().map(|v| v.abs()).collect();
    let (speed_mean, _) = mean_and_se(&speeds);
    let noise_ok = signed_mean.abs() <= 3.0 * signed_se && speed_mean > 0.0;

    // optimal detection: signed velocity toward a right-side cluster grows
    // with cluster size d ∈ {10, 20, 40}
    let mut config = regime_world_config();
    config.prior = GaussianBelief { mu: 0.0, var: 10.0 };
    config.gain = 0.1;
    let mut means = Vec::new();
    let mut ses = Vec::new();
    for (i, &d) in [10usize, 20, 40].iter().enumerate() {
        let mut positions = vec![500.0];
        for j in 0..d {
            positions.push(501.0 + 8.0 * (j as f64 + 1.0) / d as f64);
        }
        let world = world_with_positions(config.clone(), &positions);
        let mut rng = rng_for_task(0xACCA, i as u64);
        let mut samples = Vec::with_capacity(1000);
        for _ in 0..1000 {
            let obs = sense(&world, 0, &mut rng);
            let mut agent = world.agents[0];
            update_belief(&mut agent, &obs, &config);
            move_agent(&mut agent, &config, &mut rng);
            samples.push(agent.last_velocity);
        }
        let (mean, se) = mean_and_se(&samples);
        means.push(mean);
        ses.push(se);
    }
    let positive = means[0] > 3.0 * ses[0];
    let increasing = (1..3).all(|i| {
        means[i] - means[i - 1] > 3.0 * (ses[i] * ses[i] + ses[i - 1] * ses[i - 1]).sqrt()
    });
    let optimal_ok = positive && increasing;

    let elapsed = started.elapsed().as_secs_f64();
    let ok = noise_ok && optimal_ok && elapsed < 120.0;
    println!(
        "ACCEPTANCE 8 (spatial regime signatures): {} — noise regime: signed mean \
         {signed_mean:.4} (|·| ≤ 3σ = {:.4}), mean speed {speed_mean:.4} > 0: {}; optimal \
         regime: v̄(10,20,40) = ({:.3}, {:.3}, {:.3}) positive and increasing at 3σ: {}; \
         {elapsed:.2}s (< 120s)",
        verdict(ok),
        3.0 * signed_se,
        verdict(noise_ok),
        means[0],
        means[1],
        means[2],
        verdict(optimal_ok),
    );
    assert!(
        ok,
        "noise {noise_ok}, optimal {optimal_ok}, elapsed {elapsed}"
    );
}

// ---- criterion 9: byte-identical reruns of every CLI mode ----

fn fepnet() -> std::process::Command {
    std::process::Command::new(env!("CARGO_BIN_EXE_fepnet"))
}

fn run_mode(mode: &str, config_path: &std::path::Path, out: &std::path::Path) {
    let output = fepnet()
        .arg(mode)
        .arg("--config")
        .arg(config_path)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "{mode} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Primary outputs: everything except the wall-time-bearing sidecars.
fn primary_files(root: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let name = path.file_name().unwrap().to_string_lossy().to_string();
                if name != "meta.json" && name != "run_record.json" {
                    files.push(path);
                }
            }
        }
    }
    files.sort();
    files
}

fn assert_identical_trees(a: &std::path::Path, b: &std::path::Path, label: &str) -> usize {
    let files_a = primary_files(a);
    let files_b = primary_files(b);
    let rel =
        |f: &std::path::Path, root: &std::path::Path| f.strip_prefix(root).unwrap().to_path_buf();
    let rel_a: Vec<_> = files_a.iter().map(|f| rel(f, a)).collect();
    let rel_b: Vec<_> = files_b.iter().map(|f| rel(f, b)).collect();
    assert_eq!(rel_a, rel_b, "{label}: file sets differ");
    for (fa, fb) in files_a.iter().zip(&files_b) {
        let bytes_a = std::fs::read(fa).unwrap();
        let bytes_b = std::fs::read(fb).unwrap();
        assert_eq!(
            bytes_a,
            bytes_b,
            "{label}: {} differs between reruns",
            fa.display()
        );
    }
    files_a.len()
}

#[test]
fn acceptance_9_cli_determinism() {
    let started = Instant::now();
    let workdir = tempfile::tempdir().unwrap();
    let dir = workdir.path();

    let write = |name: &str, body: &str| {
        let path = dir.join(name);
        std::fs::write(&path, body).unwrap();
        path
    };

    let grow_cfg = write(
        "grow.json",
        r#"{"mode": "grow", "seed": 11, "replicates": 2, "growth": {"n_final": 2000,
            "kernel": {"phenomenological": {"d_noise": 5.0, "k_star": 50.0, "nu": 1.5,
            "decay_s": 12.5}}}}"#,
    );
    let grow_ba_cfg = write(
        "grow_ba.json",
        r#"{"mode": "grow-ba", "seed": 12, "growth": {"n_final": 2000}}"#,
    );
    let simulate_cfg = write(
        "simulate.json",
        r#"{"mode": "simulate", "seed": 13, "simulate": {
            "domain_length": 200.0, "sense_range": 10.0, "link_range": 2.0,
            "n_initial": 50, "n_steps": 20, "snapshot_every": 5, "arrival_rate": 1.0,
            "detection": {"p_detect": 0.5}, "prior": {"var": 1.0},
            "likelihood": {"alpha": 0.5, "var_d": 1.0},
            "limits": {"k_max": 32, "v_max": 5.0}}}"#,
    );
    let kernel_table_cfg = write(
        "kernel_table.json",
        r#"{"mode": "kernel-table", "kernel_spec": {"alpha": 0.5, "var_d": 1.0,
            "prior_var": 4.0, "k_max": 100, "b_max": 50.0, "v_max": 50.0, "eta": 2.5,
            "t0": 40.0}}"#,
    );
    let sweep_cfg = write(
        "sweep.json",
        r#"{"mode": "sweep", "seed": 14, "growth": {"n_final": 800,
            "kernel": {"phenomenological": {"d_noise": 5.0, "k_star": 50.0, "nu": 1.5,
            "decay_s": 12.5}}},
            "sweep": {"parameter": "growth.kernel.phenomenological.nu",
            "values": [1.0, 2.0]}}"#,
    );

    let mut compared = 0usize;
    for (mode, cfg) in [
        ("grow", &grow_cfg),
        ("grow-ba", &grow_ba_cfg),
        ("simulate", &simulate_cfg),
        ("kernel-table", &kernel_table_cfg),
        ("sweep", &sweep_cfg),
    ] {
        let out_a = dir.join(format!("{mode}_a"));
        let out_b = dir.join(format!("{mode}_b"));
        run_mode(mode, cfg, &out_a);
        run_mode(mode, cfg, &out_b);
        compared += assert_identical_trees(&out_a, &out_b, mode);
    }

    // analyze runs on an edge list produced above
    let edges = dir.join("grow_a/rep_000/edges.txt");
    let analyze_cfg = write(
        "analyze.json",
        &format!(
            r#"{{"mode": "analyze", "analyze": {{"input": "{}"}}}}"#,
            edges.display()
        ),
    );
    let out_a = dir.join("analyze_a");
    let out_b = dir.join("analyze_b");
    run_mode("analyze", &analyze_cfg, &out_a);
    run_mode("analyze", &analyze_cfg, &out_b);
    compared += assert_identical_trees(&out_a, &out_b, "analyze");

    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "ACCEPTANCE 9 (CLI determinism): PASS — all 6 modes rerun byte-identical on \
         {compared} primary files, {elapsed:.2}s",
    );
}
