//! Serializable run recipes.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::source::{CIFAR10, KNOWN};
use crate::mi::EstimatorConfig;
use crate::nn::{Activation, LayerSpec, NetworkSpec, SpecError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config at `{path}`: {msg}")]
    Invalid { path: String, msg: String },
    #[error("config schema version {found} is not supported (this build reads version {supported})")]
    Version { found: u64, supported: u32 },
    #[error(transparent)]
    Network(#[from] SpecError),
}

fn invalid(path: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.to_string(),
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub name: String,
    pub train_size: usize,
    pub test_size: usize,
    pub seed: u64,
}

/// A max-pool layer placed right after conv layer `after_layer` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolingInsertion {
    pub after_layer: usize,
    pub pool: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureConfig {
    pub conv_widths: Vec<usize>,
    pub kernel_sizes: Vec<usize>,
    #[serde(default)]
    pub pooling: Vec<PoolingInsertion>,
    /// Hidden FC widths followed by the class count.
    pub fc_widths: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub total_epochs: usize,
    pub measurement_epochs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub dataset: DatasetConfig,
    pub architecture: ArchitectureConfig,
    pub optimizer: OptimizerConfig,
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    pub run_seed: u64,
}

/// Sample sizes, batch size and schedule presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// 1000/1000 samples, batch 100, 300 epochs.
    Desk,
    /// 10k/10k samples (50k CIFAR training images), batch 1000, 2000 epochs.
    Paper,
}

pub const MEASUREMENT_POINTS: usize = 40;

impl Profile {
    pub fn apply(self, config: &mut ExperimentConfig) {
        let (train, test, batch, epochs) = match self {
            Profile::Desk => (1000, 1000, 100, 300),
            Profile::Paper if config.dataset.name == CIFAR10 => (50_000, 10_000, 1000, 2000),
            Profile::Paper => (10_000, 10_000, 1000, 2000),
        };
        config.dataset.train_size = train;
        config.dataset.test_size = test;
        config.optimizer.batch_size = batch;
        config.set_epochs(epochs, MEASUREMENT_POINTS);
    }
}

impl std::str::FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(format!("unknown profile `{other}` (expected desk or paper)")),
        }
    }
}

impl ExperimentConfig {
    /// Parses JSON, reporting the key path of any schema error.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| invalid("", e.to_string()))?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v != u64::from(SCHEMA_VERSION) => {
                return Err(ConfigError::Version {
                    found: v,
                    supported: SCHEMA_VERSION,
                })
            }
            _ => {}
        }
        let config: Self = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            invalid(&path, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn set_epochs(&mut self, total: usize, points: usize) {
        self.schedule.total_epochs = total;
        self.schedule.measurement_epochs = measurement_schedule(total, points.min(total).max(2.min(total)))
            .unwrap_or_else(|_| (1..=total).collect());
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !KNOWN.contains(&self.dataset.name.as_str()) {
            return Err(invalid(
                "dataset.name",
                format!("unknown dataset `{}` (known: {})", self.dataset.name, KNOWN.join(", ")),
            ));
        }
        if self.dataset.train_size == 0 {
            return Err(invalid("dataset.train_size", "must be positive"));
        }
        if self.dataset.test_size == 0 {
            return Err(invalid("dataset.test_size", "must be positive"));
        }
        let arch = &self.architecture;
        if arch.conv_widths.len() != arch.kernel_sizes.len() {
            return Err(invalid(
                "architecture.kernel_sizes",
                format!(
                    "{} kernel sizes for {} conv layers",
                    arch.kernel_sizes.len(),
                    arch.conv_widths.len()
                ),
            ));
        }
        for p in &arch.pooling {
            if p.after_layer >= arch.conv_widths.len() {
                return Err(invalid(
                    "architecture.pooling",
                    format!("pool after conv layer {} but only {} conv layers", p.after_layer, arch.conv_widths.len()),
                ));
            }
        }
        if arch.fc_widths.is_empty() {
            return Err(invalid("architecture.fc_widths", "needs at least the output layer"));
        }
        if !(self.optimizer.learning_rate > 0.0 && self.optimizer.learning_rate.is_finite()) {
            return Err(invalid("optimizer.learning_rate", "must be positive and finite"));
        }
        if self.optimizer.batch_size == 0 {
            return Err(invalid("optimizer.batch_size", "must be positive"));
        }
        if self.optimizer.batch_size > self.dataset.train_size {
            return Err(invalid("optimizer.batch_size", "exceeds dataset.train_size"));
        }
        let sched = &self.schedule;
        if sched.total_epochs == 0 {
            return Err(invalid("schedule.total_epochs", "must be positive"));
        }
        let m = &sched.measurement_epochs;
        if m.is_empty() {
            return Err(invalid("schedule.measurement_epochs", "must not be empty"));
        }
        if m.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("schedule.measurement_epochs", "must be strictly increasing"));
        }
        if m[0] < 1 || *m.last().unwrap() > sched.total_epochs {
            return Err(invalid(
                "schedule.measurement_epochs",
                format!("must lie within [1, {}]", sched.total_epochs),
            ));
        }
        if let Err(e) = EstimatorConfig::new(self.estimator.bin_size) {
            return Err(invalid("estimator.bin_size", e.to_string()));
        }
        build_network(self)?.validate()?;
        Ok(())
    }
}

fn input_shape(dataset: &str) -> [usize; 3] {
    if dataset == CIFAR10 {
        [32, 32, 1]
    } else {
        [28, 28, 1]
    }
}

/// Conv stack with pooling insertions, flatten, then the FC stack. Hidden
/// layers use tanh and the last FC layer softmax.
pub fn build_network(config: &ExperimentConfig) -> Result<NetworkSpec, ConfigError> {
    let arch = &config.architecture;
    if arch.conv_widths.len() != arch.kernel_sizes.len() {
        return Err(invalid("architecture.kernel_sizes", "length differs from conv_widths"));
    }
    let class_count = *arch
        .fc_widths
        .last()
        .ok_or_else(|| invalid("architecture.fc_widths", "needs at least the output layer"))?;
    let mut layers = Vec::new();
    for (i, (&w, &k)) in arch.conv_widths.iter().zip(&arch.kernel_sizes).enumerate() {
        layers.push(LayerSpec::conv(w, k));
        for p in arch.pooling.iter().filter(|p| p.after_layer == i) {
            layers.push(LayerSpec::MaxPool { pool: p.pool });
        }
    }
    layers.push(LayerSpec::Flatten);
    let last = arch.fc_widths.len() - 1;
    for (i, &w) in arch.fc_widths.iter().enumerate() {
        let act = if i == last { Activation::Softmax } else { Activation::Tanh };
        layers.push(LayerSpec::dense(w, act));
    }
    Ok(NetworkSpec {
        layers,
        input_shape: input_shape(&config.dataset.name),
        class_count,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("measurement schedule needs 2 <= points <= total_epochs, got points={points}, total_epochs={total_epochs}")]
pub struct ScheduleError {
    pub total_epochs: usize,
    pub points: usize,
}

/// `points` distinct, roughly geometrically spaced epochs in
/// `[1, total_epochs]`, always containing both endpoints.
pub fn measurement_schedule(total_epochs: usize, points: usize) -> Result<Vec<usize>, ScheduleError> {
    if points < 2 || total_epochs < points {
        return Err(ScheduleError { total_epochs, points });
    }
    let ratio = (total_epochs as f64).ln() / (points - 1) as f64;
    let mut epochs = Vec::with_capacity(points);
    for i in 0..points {
        let ideal = (i as f64 * ratio).exp().round() as usize;
        // Push crowded early epochs apart while leaving room for the rest.
        let floor = epochs.last().map_or(1, |&e: &usize| e + 1);
        let ceiling = total_epochs - (points - 1 - i);
        epochs.push(ideal.max(floor).min(ceiling));
    }
    Ok(epochs)
}
