//! One-dimensional periodic world of sensing, believing, moving agents.
//!
//! Each step every agent counts neighbours within its sensing range on each
//! side (capped at k_max per side), draws the exact detection statistic,
//! recomputes its posterior fresh from the fixed prior (no carry-over between
//! windows), and moves with velocity γμ_b plus Gaussian noise of variance
//! σ_b², clamped to ±v_max. Proximity snapshots link agents within the link
//! radius and record connected-component sizes.

use crate::belief::{posterior_mean, posterior_var, GaussianBelief, LikelihoodModel, Observation};
use crate::detection::{sample_detection_statistic, ClusterScene, DetectionParams};
use crate::kernel::AgentLimits;
use crate::rng::{rng_for_task, sample_poisson, sample_standard_normal, SimRng};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpatialError {
    #[error("invalid world config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
}

/// Whether agents update against the previous step's positions or see the
/// effects of earlier agents within the same step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateOrder {
    Synchronous,
    Sequential,
}

/// Initial positions: uniform over the domain, or packed into [0, width).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialPlacement {
    Uniform,
    Clustered { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    /// Coordinate in [0, L).
    pub position: f64,
    pub belief: GaussianBelief,
    pub last_velocity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldConfig {
    pub domain_length: f64,
    /// Sensing radius R.
    pub sense_range: f64,
    /// Link radius for proximity snapshots.
    pub link_range: f64,
    pub dt: f64,
    pub detection: DetectionParams,
    pub prior: GaussianBelief,
    pub lik: LikelihoodModel,
    /// Velocity gain γ.
    pub gain: f64,
    pub limits: AgentLimits,
    /// Poisson arrival rate λ (agents per unit time).
    pub arrival_rate: f64,
    pub n_initial: usize,
    pub n_steps: usize,
    pub snapshot_every: usize,
    pub seed: u64,
    pub update_order: UpdateOrder,
    pub placement: InitialPlacement,
}

impl WorldConfig {
    pub fn validate(&self) -> Result<(), SpatialError> {
        let mut problems = Vec::new();
        if !(self.domain_length > 0.0) {
            problems.push(format!(
                "domain_length must be positive, got {}",
                self.domain_length
            ));
        }
        if !(self.link_range > 0.0) {
            problems.push(format!(
                "link_range must be positive, got {}",
                self.link_range
            ));
        }
        if self.link_range > self.sense_range {
            problems.push(format!(
                "link_range ({}) must not exceed sense_range ({})",
                self.link_range, self.sense_range
            ));
        }
        if !(self.sense_range < self.domain_length / 2.0) {
            problems.push(format!(
                "sense_range ({}) must be below half the domain length ({})",
                self.sense_range,
                self.domain_length / 2.0
            ));
        }
        if !(self.dt > 0.0) {
            problems.push(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.arrival_rate >= 0.0) {
            problems.push(format!(
                "arrival_rate must be >= 0, got {}",
                self.arrival_rate
            ));
        }
        if !(self.gain > 0.0) {
            problems.push(format!("gain must be positive, got {}", self.gain));
        }
        if self.snapshot_every == 0 {
            problems.push("snapshot_every must be >= 1".to_string());
        }
        if let InitialPlacement::Clustered { width } = self.placement {
            if !(width > 0.0 && width <= self.domain_length) {
                problems.push(format!(
                    "clustered placement width ({width}) must lie in (0, domain_length]"
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SpatialError::InvalidConfig(problems))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub agents: Vec<Agent>,
    pub time: usize,
    pub config: WorldConfig,
}

/// Proximity graph and cluster statistics at one time index.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: usize,
    /// Links (i < j) between agents within link_range, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Connected-component sizes, descending.
    pub cluster_sizes: Vec<usize>,
    /// (mu, var) per agent.
    pub beliefs: Vec<(f64, f64)>,
}

fn forward_distance(from: f64, to: f64, length: f64) -> f64 {
    (to - from).rem_euclid(length)
}

/// Shortest periodic distance between two coordinates.
pub fn periodic_distance(a: f64, b: f64, length: f64) -> f64 {
    let d = (a - b).rem_euclid(length);
    d.min(length - d)
}

impl World {
    pub fn new(config: WorldConfig, rng: &mut SimRng) -> Result<Self, SpatialError> {
        config.validate()?;
        let mut agents = Vec::with_capacity(config.n_initial);
        for _ in 0..config.n_initial {
            let position = match config.placement {
                InitialPlacement::Uniform => rng.gen::<f64>() * config.domain_length,
                InitialPlacement::Clustered { width } => rng.gen::<f64>() * width,
            };
            agents.push(Agent {
                position,
                belief: config.prior,
                last_velocity: 0.0,
            });
        }
        Ok(World {
            agents,
            time: 0,
            config,
        })
    }
}

/// Count neighbours of agent `idx` within the sensing range, per side,
/// nearest-first capped at k_max.
pub fn scene_for(world: &World, idx: usize) -> ClusterScene {
    let cfg = &world.config;
    let me = world.agents[idx].position;
    let mut right = 0usize;
    let mut left = 0usize;
    for (j, other) in world.agents.iter().enumerate() {
        if j == idx {
            continue;
        }
        let ahead = forward_distance(me, other.position, cfg.domain_length);
        if ahead > 0.0 && ahead <= cfg.sense_range {
            right += 1;
        } else {
            let behind = forward_distance(other.position, me, cfg.domain_length);
            if behind > 0.0 && behind <= cfg.sense_range {
                left += 1;
            }
        }
    }
    ClusterScene {
        d_right: right.min(cfg.limits.k_max),
        d_left: left.min(cfg.limits.k_max),
    }
}

/// Observe the local scene: build the cluster counts and draw the exact
/// detection statistic.
pub fn sense(world: &World, idx: usize, rng: &mut SimRng) -> Observation {
    let scene = scene_for(world, idx);
    Observation {
        d_stat: sample_detection_statistic(&scene, &world.config.detection, rng),
    }
}

/// Fresh posterior from the fixed prior and this window's observation; the
/// mean is clamped to ±b_max.
pub fn update_belief(agent: &mut Agent, obs: &Observation, config: &WorldConfig) {
    let mu = posterior_mean(&config.prior, &config.lik, obs);
    agent.belief = GaussianBelief {
        mu: mu.clamp(-config.limits.b_max, config.limits.b_max),
        var: posterior_var(&config.prior, &config.lik),
    };
}

/// Noisy action: v = γμ_b + η_v with η_v ~ N(0, σ_b²), clamped to ±v_max;
/// position advances by v·dt on the ring.
pub fn move_agent(agent: &mut Agent, config: &WorldConfig, rng: &mut SimRng) {
    let noise = sample_standard_normal(rng) * agent.belief.var.sqrt();
    let v =
        (config.gain * agent.belief.mu + noise).clamp(-config.limits.v_max, config.limits.v_max);
    agent.position = (agent.position + v * config.dt).rem_euclid(config.domain_length);
    agent.last_velocity = v;
}

/// Advance the world one step: perception, belief update and movement for
/// every agent, then Poisson arrivals placed uniformly with prior beliefs.
pub fn step(world: &mut World, rng: &mut SimRng) {
    match world.config.update_order {
        UpdateOrder::Synchronous => {
            // all sense against the frozen previous positions, then all move
            let frozen = world.clone();
            let mut observations = Vec::with_capacity(world.agents.len());
            for idx in 0..world.agents.len() {
                observations.push(sense(&frozen, idx, rng));
            }
            let config = world.config.clone();
            for (agent, obs) in world.agents.iter_mut().zip(&observations) {
                update_belief(agent, obs, &config);
            }
            for agent in world.agents.iter_mut() {
                move_agent(agent, &config, rng);
            }
        }
        UpdateOrder::Sequential => {
            let config = world.config.clone();
            for idx in 0..world.agents.len() {
                let obs = sense(world, idx, rng);
                let agent = &mut world.agents[idx];
                update_belief(agent, &obs, &config);
                move_agent(agent, &config, rng);
            }
        }
    }
    let arrivals = sample_poisson(rng, world.config.arrival_rate * world.config.dt);
    for _ in 0..arrivals {
        let position = rng.gen::<f64>() * world.config.domain_length;
        world.agents.push(Agent {
            position,
            belief: world.config.prior,
            last_velocity: 0.0,
        });
    }
    world.time += 1;
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Proximity graph at the current instant: i ~ j iff periodic distance ≤
/// link_range (boundary inclusive). Components via union-find.
pub fn snapshot_graph(world: &World) -> Snapshot {
    let n = world.agents.len();
    let length = world.config.domain_length;
    let r_link = world.config.link_range;

    // sweep over positions sorted on the ring; only pairs within r_link can link
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        world.agents[a]
            .position
            .partial_cmp(&world.agents[b].position)
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut edges = Vec::new();
    let mut uf = UnionFind::new(n);
    for (rank, &i) in order.iter().enumerate() {
        let pi = world.agents[i].position;
        for offset in 1..n {
            let &j = &order[(rank + offset) % n];
            if j == i {
                break;
            }
            let ahead = forward_distance(pi, world.agents[j].position, length);
            if ahead > r_link {
                break;
            }
            let pair = (i.min(j), i.max(j));
            edges.push(pair);
            uf.union(pair.0, pair.1);
        }
    }
    edges.sort_unstable();
    edges.dedup();

    let mut size_by_root = std::collections::HashMap::new();
    for idx in 0..n {
        *size_by_root.entry(uf.find(idx)).or_insert(0usize) += 1;
    }
    let mut cluster_sizes: Vec<usize> = size_by_root.into_values().collect();
    cluster_sizes.sort_unstable_by(|a, b| b.cmp(a));

    let beliefs = world
        .agents
        .iter()
        .map(|a| (a.belief.mu, a.belief.var))
        .collect();
    Snapshot {
        time: world.time,
        edges,
        cluster_sizes,
        beliefs,
    }
}

/// Run the full simulation, emitting a snapshot at time 0 and after every
/// `snapshot_every` steps. Deterministic under the config seed.
pub fn run(config: &WorldConfig) -> Result<Vec<Snapshot>, SpatialError> {
    config.validate()?;
    let mut rng = rng_for_task(config.seed, 0);
    let mut world = World::new(config.clone(), &mut rng)?;
    let mut snapshots = vec![snapshot_graph(&world)];
    for step_index in 1..=config.n_steps {
        step(&mut world, &mut rng);
        if step_index % config.snapshot_every == 0 {
            snapshots.push(snapshot_graph(&world));
        }
    }
    Ok(snapshots)
}
