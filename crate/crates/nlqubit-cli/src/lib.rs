//! Library behind the `nlqubit` binary: experiment configs, runners, and
//! machine-readable outputs. Kept as a library so integration tests can
//! drive experiments in-process.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::{run_experiment, RunOutcome};
