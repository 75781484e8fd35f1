//! Binning-based mutual-information estimation for layer activations.

pub mod binning;
pub mod dpi;
pub mod entropy;
pub mod measure;

use thiserror::Error;

pub use binning::{bin_activations, fingerprint, flatten_layer, BinnedCode, EstimatorConfig, DEFAULT_BIN_SIZE};
pub use dpi::{dpi_diagnostic, DpiViolation, Quantity};
pub use entropy::{entropy_from_counts, mi_t_y, mi_x_t, plug_in_entropy, LabelDistribution};
pub use measure::{input_entropy, measure_layers, EpochMIRecord, MeasureContext, SplitMeasurement};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MiError {
    #[error("entropy of an empty sample is undefined")]
    Empty,
    #[error("{codes} codes but {labels} labels")]
    LengthMismatch { codes: usize, labels: usize },
    #[error("non-finite activation at position {position}{}{}", layer.map(|l| format!(" of layer {l}")).unwrap_or_default(), epoch.map(|e| format!(" at epoch {e}")).unwrap_or_default())]
    NonFinite {
        layer: Option<usize>,
        epoch: Option<usize>,
        position: usize,
    },
    #[error("bin size must be positive and finite, got {0}")]
    BadBinSize(f64),
    #[error("label {0} outside the label distribution")]
    LabelOutOfRange(u8),
    #[error("trace has {found} layers, measurement expects {expected}")]
    LayerCount { expected: usize, found: usize },
}
