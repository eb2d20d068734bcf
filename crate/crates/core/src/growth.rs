//! Kernel-driven network growth and its mean-field oracle.
//!
//! Growth starts from a small ring (every seed node has degree 2, so kernels
//! are never evaluated at degree 0) and adds one node per step. Each arrival
//! connects to `m_links` distinct existing nodes, drawn without replacement
//! with probability proportional to the kernel evaluated at current degree.
//! Distinctness is enforced by rejection; target weights are refreshed only
//! after all links of one arrival have landed.

use crate::rng::SimRng;
use crate::sumtree::SumTree;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GrowthError {
    #[error("invalid growth config: {0}")]
    InvalidConfig(String),
    #[error(
        "kernel returned {value} at degree {degree} (node {node}); must be positive and finite"
    )]
    BadKernelValue {
        node: usize,
        degree: usize,
        value: f64,
    },
    #[error("rate equation lost normalization at step {step}: total mass {mass}")]
    Numeric { step: usize, mass: f64 },
    #[error("edge list is malformed: {0}")]
    MalformedEdges(String),
}

/// Undirected simple graph with degree bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    degrees: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.degrees[node]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Edges normalized to u < v, in insertion order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges sorted ascending by (u, v) — the on-disk order.
    pub fn sorted_edges(&self) -> Vec<(usize, usize)> {
        let mut out = self.edges.clone();
        out.sort_unstable();
        out
    }

    /// Build from an explicit edge set; rejects self-loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(node_count: usize, raw: &[(usize, usize)]) -> Result<Self, GrowthError> {
        let mut g = Graph {
            degrees: vec![0; node_count],
            edges: Vec::with_capacity(raw.len()),
        };
        let mut seen = std::collections::HashSet::with_capacity(raw.len());
        for &(a, b) in raw {
            if a == b {
                return Err(GrowthError::MalformedEdges(format!(
                    "self-loop at node {a}"
                )));
            }
            if a >= node_count || b >= node_count {
                return Err(GrowthError::MalformedEdges(format!(
                    "edge ({a}, {b}) exceeds node count {node_count}"
                )));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(GrowthError::MalformedEdges(format!(
                    "duplicate edge ({}, {})",
                    key.0, key.1
                )));
            }
            g.push_edge(a, b);
        }
        Ok(g)
    }

    fn with_seed_ring(seed_nodes: usize) -> Self {
        let mut g = Graph {
            degrees: vec![0; seed_nodes],
            edges: Vec::new(),
        };
        for i in 0..seed_nodes {
            g.push_edge(i, (i + 1) % seed_nodes);
        }
        g
    }

    fn add_node(&mut self) -> usize {
        self.degrees.push(0);
        self.degrees.len() - 1
    }

    fn push_edge(&mut self, a: usize, b: usize) {
        debug_assert_ne!(a, b);
        self.edges.push((a.min(b), a.max(b)));
        self.degrees[a] += 1;
        self.degrees[b] += 1;
    }

    /// Degree sum must equal twice the edge count.
    pub fn degree_sum_consistent(&self) -> bool {
        self.degrees.iter().sum::<usize>() == 2 * self.edge_count()
    }
}

/// Structural parameters of a growth run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthConfig {
    /// Final node count (≥ seed_nodes).
    pub n_final: usize,
    /// Links per arriving node (≥ 1).
    pub m_links: usize,
    /// Ring size to start from (≥ 3 and ≥ m_links).
    pub seed_nodes: usize,
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<(), GrowthError> {
        let mut problems = Vec::new();
        if self.m_links < 1 {
            problems.push("m_links must be >= 1".to_string());
        }
        if self.seed_nodes < 3 {
            problems.push(format!(
                "seed_nodes must be >= 3 to form a ring, got {}",
                self.seed_nodes
            ));
        }
        if self.seed_nodes < self.m_links {
            problems.push(format!(
                "seed_nodes ({}) must be >= m_links ({})",
                self.seed_nodes, self.m_links
            ));
        }
        if self.n_final < self.seed_nodes {
            problems.push(format!(
                "n_final ({}) must be >= seed_nodes ({})",
                self.n_final, self.seed_nodes
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(GrowthError::InvalidConfig(problems.join("; ")))
        }
    }
}

/// Kernel values memoized by degree; degrees only ever step upward during
/// growth so the cache extends monotonically.
struct KernelCache<F: Fn(usize) -> f64> {
    kernel: F,
    values: Vec<f64>,
}

impl<F: Fn(usize) -> f64> KernelCache<F> {
    fn new(kernel: F) -> Self {
        Self {
            kernel,
            values: Vec::new(),
        }
    }

    fn weight(&mut self, node: usize, degree: usize) -> Result<f64, GrowthError> {
        while self.values.len() <= degree {
            let d = self.values.len();
            let value = if d == 0 { f64::NAN } else { (self.kernel)(d) };
            self.values.push(value);
        }
        let value = self.values[degree];
        if !(value > 0.0) || !value.is_finite() {
            return Err(GrowthError::BadKernelValue {
                node,
                degree,
                value,
            });
        }
        Ok(value)
    }
}

/// Grow a network under an arbitrary positive attachment kernel.
pub fn grow<F: Fn(usize) -> f64>(
    config: &GrowthConfig,
    kernel: F,
    rng: &mut SimRng,
) -> Result<Graph, GrowthError> {
    config.validate()?;
    let mut graph = Graph::with_seed_ring(config.seed_nodes);
    let mut cache = KernelCache::new(kernel);
    let mut weights = SumTree::new(config.n_final);
    for node in 0..config.seed_nodes {
        weights.set(node, cache.weight(node, graph.degree(node))?);
    }

    let mut chosen: Vec<usize> = Vec::with_capacity(config.m_links);
    while graph.node_count() < config.n_final {
        chosen.clear();
        while chosen.len() < config.m_links {
            let probe = rng.gen::<f64>() * weights.total();
            let target = weights.select(probe);
            if !chosen.contains(&target) {
                chosen.push(target);
            }
        }
        let new_node = graph.add_node();
        for &target in &chosen {
            graph.push_edge(new_node, target);
        }
        // weights refresh only after all m links have landed
        for &target in &chosen {
            weights.set(target, cache.weight(target, graph.degree(target))?);
        }
        weights.set(new_node, cache.weight(new_node, graph.degree(new_node))?);
    }
    Ok(graph)
}

/// Barabási–Albert baseline: linear kernel K(k) = k.
pub fn grow_ba(config: &GrowthConfig, rng: &mut SimRng) -> Result<Graph, GrowthError> {
    grow(config, |k| k as f64, rng)
}

/// Mean-field oracle for the expected degree distribution under a kernel.
///
/// Tracks expected node counts N_k. Per step, one node of degree `m_links`
/// arrives and m units of attachment flow from degree k to k+1 with rate
/// kernel(k)·N_k / Σ_j kernel(j)·N_j. The top bin `k_cap` absorbs. Returns
/// N_k/N normalized to unit mass, indexed by degree (index 0 unused).
pub fn rate_equation<F: Fn(usize) -> f64>(
    kernel: F,
    m_links: usize,
    seed_nodes: usize,
    n_steps: usize,
    k_cap: usize,
) -> Result<Vec<f64>, GrowthError> {
    if m_links < 1 {
        return Err(GrowthError::InvalidConfig("m_links must be >= 1".into()));
    }
    if seed_nodes < 3 {
        return Err(GrowthError::InvalidConfig("seed_nodes must be >= 3".into()));
    }
    if k_cap <= m_links.max(2) {
        return Err(GrowthError::InvalidConfig(format!(
            "k_cap ({k_cap}) too small"
        )));
    }
    let kernel_values: Vec<f64> = (0..=k_cap)
        .map(|k| if k == 0 { 0.0 } else { (kernel)(k) })
        .collect();
    for (k, &value) in kernel_values.iter().enumerate().skip(1) {
        if !(value > 0.0) || !value.is_finite() {
            return Err(GrowthError::BadKernelValue {
                node: 0,
                degree: k,
                value,
            });
        }
    }

    let mut counts = vec![0.0f64; k_cap + 1];
    counts[2] = seed_nodes as f64; // seed ring: everyone at degree 2
    let mut top = 2usize; // highest occupied degree
    let m = m_links as f64;
    let mut flux = vec![0.0f64; k_cap + 1];

    for step in 0..n_steps {
        let mut total_weight = 0.0;
        for k in 1..=top {
            total_weight += kernel_values[k] * counts[k];
        }
        if !(total_weight > 0.0) || !total_weight.is_finite() {
            return Err(GrowthError::Numeric {
                step,
                mass: total_weight,
            });
        }
        let scale = m / total_weight;
        for k in 1..=top {
            flux[k] = kernel_values[k] * counts[k] * scale;
        }
        // absorbing top bin: no outflow from k_cap
        let hi = top.min(k_cap - 1);
        for k in (1..=hi).rev() {
            let f = flux[k];
            counts[k] -= f;
            counts[k + 1] += f;
        }
        if top < k_cap && counts[top + 1] > 0.0 {
            top += 1;
        }
        counts[m_links] += 1.0;
        top = top.max(m_links);
    }

    let total: f64 = counts.iter().sum();
    let expected = (seed_nodes + n_steps) as f64;
    if (total - expected).abs() > 1e-6 * expected {
        return Err(GrowthError::Numeric {
            step: n_steps,
            mass: total,
        });
    }
    Ok(counts.iter().map(|c| c / total).collect())
}
