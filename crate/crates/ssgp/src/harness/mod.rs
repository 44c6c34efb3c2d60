//! Experiment harness: configuration, Monte Carlo orchestration,
//! distributional tests and report artifacts.

pub mod config;
pub mod experiment;
pub mod ks;
pub mod output;

pub use config::{parse_config, ExperimentConfig, ExperimentKind};
pub use experiment::{run_experiment, CheckKind, CheckRow, ExperimentReport};
pub use ks::{ks_two_sample, KsResult};
pub use output::{emit_outputs, render_csv, CSV_HEADER};
