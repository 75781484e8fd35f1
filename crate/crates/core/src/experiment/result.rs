//! Persisted run output.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::ExperimentConfig;
use crate::data::Split;
use crate::mi::{DpiViolation, EpochMIRecord};

pub const RESULT_SCHEMA_VERSION: u32 = 1;

/// Training metrics at one measurement epoch, over the full splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_loss: f64,
    pub test_acc: f64,
}

/// Constant reference levels for one evaluation split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReference {
    pub split: Split,
    pub samples: usize,
    pub distinct_inputs: usize,
    pub h_x_bits: f64,
    pub h_y_bits: f64,
    pub label_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    /// Names of the recorded layers, indexed like `EpochMIRecord::layer`.
    pub layers: Vec<String>,
    /// Mean mini-batch loss of every training epoch.
    pub epoch_losses: Vec<f64>,
    pub metrics: Vec<EpochMetrics>,
    pub references: Vec<SplitReference>,
    pub records: Vec<EpochMIRecord>,
    pub dpi_warnings: Vec<DpiViolation>,
    /// Present only when fingerprints were audited against exact bin vectors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint_collisions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RunResult {
    pub fn reference(&self, split: Split) -> Option<&SplitReference> {
        self.references.iter().find(|r| r.split == split)
    }

    pub fn records_for(&self, split: Split) -> impl Iterator<Item = &EpochMIRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }

    pub fn metrics_at(&self, epoch: usize) -> Option<&EpochMetrics> {
        self.metrics.iter().find(|m| m.epoch == epoch)
    }

    pub fn final_layer(&self) -> usize {
        self.layers.len() - 1
    }

    /// Run label used in tables: sweep/variant when present.
    pub fn run_id(&self) -> String {
        let c = &self.config;
        match (&c.sweep, &c.variant) {
            (Some(s), Some(v)) => format!("{s}:{v}:seed{}", c.run_seed),
            (None, Some(v)) => format!("{v}:seed{}", c.run_seed),
            _ => {
                let w: Vec<String> = c.architecture.conv_widths.iter().map(|w| w.to_string()).collect();
                format!("{}:w{}:seed{}", c.dataset.name, w.join("-"), c.run_seed)
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path} is not a valid run result: {msg}")]
    Parse { path: String, msg: String },
    #[error("{path} has result schema version {found}; this build reads version {supported}")]
    Version { path: String, found: u64, supported: u32 },
}

/// Writes pretty JSON through a temporary file so readers never see a
/// partial result.
pub fn persist_run(result: &RunResult, path: &Path) -> Result<(), PersistError> {
    let io = |source| PersistError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut text = serde_json::to_string_pretty(result).expect("result serializes");
    text.push('\n');
    let tmp = path.with_extension("json.tmp");
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

pub fn load_run(path: &Path) -> Result<RunResult, PersistError> {
    let p = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| PersistError::Io { path: p.clone(), source })?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| PersistError::Parse {
        path: p.clone(),
        msg: e.to_string(),
    })?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(RESULT_SCHEMA_VERSION) => {}
        Some(found) => {
            return Err(PersistError::Version {
                path: p,
                found,
                supported: RESULT_SCHEMA_VERSION,
            })
        }
        None => {
            return Err(PersistError::Parse {
                path: p,
                msg: "missing schema_version".into(),
            })
        }
    }
    serde_path_to_error::deserialize(value).map_err(|e| PersistError::Parse {
        path: p,
        msg: format!("at `{}`: {}", e.path(), e.inner()),
    })
}
