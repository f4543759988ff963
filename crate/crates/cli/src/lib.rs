//! Configuration and dispatch behind the `dnls-lab` binary.

pub mod config;
pub mod run;

pub use config::{parse_config, to_toml, ConfigError, Experiment, RunConfig};
pub use run::{artifact_stem, run, Outcome, Status};
