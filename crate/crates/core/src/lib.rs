//! Agents that minimise variational free energy, the attachment kernels their
//! constraints imply, and the networks those kernels grow.
//!
//! The crate is organised around the pipeline:
//! belief updating ([`belief`]) → detection statistics ([`detection`]) →
//! characteristic scales and attachment kernels ([`kernel`]) → network growth
//! with a mean-field oracle ([`growth`]) → spatial agent simulation
//! ([`spatial`]) → degree-distribution analysis ([`netstats`]).

pub mod belief;
pub mod detection;
pub mod graphio;
pub mod growth;
pub mod kernel;
pub mod mathutil;
pub mod netstats;
pub mod rng;
pub mod spatial;
pub mod sumtree;

pub use belief::{GaussianBelief, LikelihoodModel, Observation};
pub use detection::{ClusterScene, DetectionParams};
pub use growth::{Graph, GrowthConfig};
pub use kernel::{AgentLimits, CharacteristicScales, KernelSpec, Regime};
pub use netstats::{DegreeHistogram, TailFit, TailModel};
pub use rng::SimRng;
pub use spatial::{Snapshot, World, WorldConfig};
