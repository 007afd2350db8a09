//! Experiment orchestration and result files.

pub mod config;
pub mod experiment;
pub mod normative;
pub mod output;

pub use config::{ExperimentConfig, InputMode};
pub use experiment::run_simulation_experiment;
pub use normative::run_normative_analysis;
pub use output::{write_results, CorrelationRow, ResultTables, StatPair, TrialRow};
