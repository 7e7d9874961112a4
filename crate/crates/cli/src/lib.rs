//! Experiment runner: TOML configs in, CSV tables and a JSON manifest out.

pub mod config;
pub mod experiments;
pub mod output;
pub mod runner;
pub mod selftest;

pub use config::{parse_config, Experiment, ExperimentConfig};
pub use runner::{run_config, run_path, CliError, RunOptions, RunReport};
