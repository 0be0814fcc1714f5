//! Run manifest: what was run, how each step ended and which files it wrote.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

/// Bumped whenever an emitted file changes layout.
pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Passed,
    Failed,
    /// The check does not apply to this input (e.g. a violated precondition).
    Skipped,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    pub name: String,
    pub status: StepStatus,
    pub seconds: f64,
    pub metrics: BTreeMap<String, f64>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the compact JSON form of the config.
    pub config_hash: String,
    pub tool_version: String,
    pub artifact_version: u32,
    pub steps: Vec<StepRecord>,
    /// Paths relative to the output directory, in emission order.
    pub files: Vec<String>,
    pub total_seconds: f64,
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig) -> Self {
        RunManifest {
            command: config.command.name().to_string(),
            config_hash: config_hash(config),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            artifact_version: ARTIFACT_VERSION,
            steps: Vec::new(),
            files: Vec::new(),
            total_seconds: 0.0,
        }
    }

    pub fn push(&mut self, name: &str, status: StepStatus, seconds: f64) -> &mut StepRecord {
        let index = self.steps.len();
        self.steps.push(StepRecord {
            index,
            name: name.to_string(),
            status,
            seconds,
            metrics: BTreeMap::new(),
            message: None,
        });
        self.steps.last_mut().expect("just pushed")
    }

    /// True iff no step failed or errored.
    pub fn success(&self) -> bool {
        self.steps.iter().all(|s| matches!(s.status, StepStatus::Passed | StepStatus::Skipped))
    }

    pub fn failures(&self) -> Vec<&StepRecord> {
        self.steps.iter().filter(|s| matches!(s.status, StepStatus::Failed | StepStatus::Error)).collect()
    }
}
