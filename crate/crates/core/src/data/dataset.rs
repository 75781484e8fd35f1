use std::fmt;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::idx::IdxError;
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub const BOTH: [Split; 2] = [Split::Train, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error(transparent)]
    Idx(#[from] IdxError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("dataset has no samples")]
    Empty,
    #[error("{images} images but {labels} labels")]
    LengthMismatch { images: usize, labels: usize },
    #[error("label {label} at sample {index} is outside [0, {class_count})")]
    LabelOutOfRange {
        index: usize,
        label: u8,
        class_count: usize,
    },
    #[error("pixel {value} at offset {offset} is outside [0, 1]")]
    PixelOutOfRange { offset: usize, value: f64 },
    #[error("images must be [N, H, W, 1], got {0:?}")]
    BadImageShape(Vec<usize>),
    #[error("CIFAR-10 payload of {0} bytes is not a whole number of 3073-byte records")]
    CifarLength(usize),
    #[error("cannot draw {count} samples from a dataset of {available}")]
    SubsampleTooLarge { count: usize, available: usize },
    #[error("unknown dataset `{0}` (known: mnist, fashion-mnist, cifar10, mnist-sample)")]
    UnknownDataset(String),
    #[error("dataset `{name}` not found at {path}; run `infoplane fetch {name}` first")]
    Missing { name: String, path: PathBuf },
}

/// Images `[N, H, W, 1]` in `[0, 1]` with aligned labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub split: Split,
    pub images: Tensor,
    pub labels: Vec<u8>,
    pub class_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsampleSpec {
    pub count: usize,
    pub seed: u64,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        split: Split,
        images: Tensor,
        labels: Vec<u8>,
        class_count: usize,
    ) -> Result<Self, DataError> {
        let shape = images.shape();
        if shape.len() != 4 || shape[3] != 1 {
            return Err(DataError::BadImageShape(shape.to_vec()));
        }
        if labels.is_empty() {
            return Err(DataError::Empty);
        }
        if shape[0] != labels.len() {
            return Err(DataError::LengthMismatch {
                images: shape[0],
                labels: labels.len(),
            });
        }
        if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l as usize >= class_count) {
            return Err(DataError::LabelOutOfRange {
                index,
                label,
                class_count,
            });
        }
        if let Some((offset, &value)) = images
            .data()
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(DataError::PixelOutOfRange { offset, value });
        }
        Ok(Self {
            name: name.into(),
            split,
            images,
            labels,
            class_count,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// (height, width)
    pub fn image_dims(&self) -> (usize, usize) {
        (self.images.shape()[1], self.images.shape()[2])
    }

    pub fn select(&self, indices: &[usize]) -> Result<Dataset, DataError> {
        if indices.is_empty() {
            return Err(DataError::Empty);
        }
        Ok(Dataset {
            name: self.name.clone(),
            split: self.split,
            images: self.images.gather_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_count: self.class_count,
        })
    }

    /// Uniform sample without replacement, in selection order.
    pub fn subsample(&self, spec: SubsampleSpec) -> Result<Dataset, DataError> {
        self.select(&self.subsample_indices(spec)?)
    }

    pub fn subsample_indices(&self, spec: SubsampleSpec) -> Result<Vec<usize>, DataError> {
        if spec.count > self.len() {
            return Err(DataError::SubsampleTooLarge {
                count: spec.count,
                available: self.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        Ok(rand::seq::index::sample(&mut rng, self.len(), spec.count).into_vec())
    }
}
