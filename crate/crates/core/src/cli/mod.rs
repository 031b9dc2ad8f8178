//! Experiment runner: config parsing, command implementations, and report
//! files. The binary in `src/main.rs` is a thin argument-parsing shell over
//! this module.

mod config;
mod report;
pub mod commands;

pub use config::{parse_config, BaselineSettings, EstimatorSettings, ExperimentSpec, Method};
pub use report::{MethodAggregate, RunReport, SeedRow};
