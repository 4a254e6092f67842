//! Experiment configuration, orchestration and artifact output.

pub mod config;
pub mod experiment;

pub use config::{ExperimentConfig, GridConfig, InitialCondition, OutputConfig, PhiInit, RunConfig, SCHEMA_VERSION};
pub use experiment::{execute, fit_slope, initial_state, run_experiment, RunOutcome, SweepOutcome};
