//! Reproducible batch runs of the cyllab solvers and checks. A run is fully
//! described by an [`ExperimentConfig`]; it writes JSON reports, CSV series and
//! a [`RunManifest`] into the configured output directory.

pub mod config;
pub mod manifest;
pub mod runner;

pub use config::{BdataSource, Command, ConfigError, ExperimentConfig, Profile};
pub use manifest::{config_hash, RunManifest, StepStatus};
pub use runner::{run, CheckReport};
