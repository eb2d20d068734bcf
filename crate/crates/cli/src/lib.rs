//! Experiment harness: configuration, orchestration and file emission for
//! the free-energy network simulations in `fepnet-core`.

pub mod config;
pub mod emit;
pub mod run;

pub use config::{parse_config, parse_config_str, ConfigError, ExperimentConfig, Mode};
pub use run::{emit_summary, run_experiment, RunError, RunRecord};
