//! Declarative layer stacks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::activation::Activation;
use super::pool::pooled_dims;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LayerSpec {
    Conv {
        width: usize,
        kernel: usize,
        activation: Activation,
    },
    #[serde(rename = "maxpool")]
    MaxPool { pool: usize },
    Flatten,
    Dense { width: usize, activation: Activation },
}

impl LayerSpec {
    pub fn conv(width: usize, kernel: usize) -> Self {
        Self::Conv {
            width,
            kernel,
            activation: Activation::Tanh,
        }
    }

    pub fn dense(width: usize, activation: Activation) -> Self {
        Self::Dense { width, activation }
    }

    pub fn has_params(&self) -> bool {
        matches!(self, Self::Conv { .. } | Self::Dense { .. })
    }

    /// Conv and dense outputs are the layers whose activations get measured.
    pub fn is_recorded(&self) -> bool {
        self.has_params()
    }

    pub fn name(&self) -> String {
        match self {
            Self::Conv { width, kernel, .. } => format!("conv{width}k{kernel}"),
            Self::MaxPool { pool } => format!("maxpool{pool}"),
            Self::Flatten => "flatten".into(),
            Self::Dense { width, .. } => format!("dense{width}"),
        }
    }
}

/// Per-sample activation shape between layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActShape {
    Spatial { height: usize, width: usize, channels: usize },
    Flat(usize),
}

impl ActShape {
    pub fn size(&self) -> usize {
        match *self {
            Self::Spatial {
                height,
                width,
                channels,
            } => height * width * channels,
            Self::Flat(d) => d,
        }
    }

    /// Batch tensor shape for `n` samples.
    pub fn batch_shape(&self, n: usize) -> Vec<usize> {
        match *self {
            Self::Spatial {
                height,
                width,
                channels,
            } => vec![n, height, width, channels],
            Self::Flat(d) => vec![n, d],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("network has no layers")]
    Empty,
    #[error("layer {index}: {msg}")]
    Layer { index: usize, msg: String },
    #[error("final layer must be dense softmax with {class_count} units")]
    BadOutput { class_count: usize },
    #[error("input shape {0:?} has a zero dimension")]
    BadInput([usize; 3]),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub layers: Vec<LayerSpec>,
    /// (height, width, channels)
    pub input_shape: [usize; 3],
    pub class_count: usize,
}

impl NetworkSpec {
    pub fn input(&self) -> ActShape {
        let [height, width, channels] = self.input_shape;
        ActShape::Spatial {
            height,
            width,
            channels,
        }
    }

    /// Output shape of every layer, validating the stack along the way.
    pub fn layer_shapes(&self) -> Result<Vec<ActShape>, SpecError> {
        if self.input_shape.contains(&0) {
            return Err(SpecError::BadInput(self.input_shape));
        }
        let last = self.layers.len().checked_sub(1).ok_or(SpecError::Empty)?;
        let mut shape = self.input();
        let mut shapes = Vec::with_capacity(self.layers.len());
        for (index, layer) in self.layers.iter().enumerate() {
            let fail = |msg: String| SpecError::Layer { index, msg };
            shape = match (*layer, shape) {
                (
                    LayerSpec::Conv {
                        width,
                        kernel,
                        activation,
                    },
                    ActShape::Spatial { height, width: w, .. },
                ) => {
                    if width == 0 {
                        return Err(fail("conv width must be >= 1".into()));
                    }
                    if kernel == 0 || kernel % 2 == 0 {
                        return Err(fail(format!("conv kernel must be odd and >= 1, got {kernel}")));
                    }
                    if activation != Activation::Tanh {
                        return Err(fail("hidden layers use tanh".into()));
                    }
                    ActShape::Spatial {
                        height,
                        width: w,
                        channels: width,
                    }
                }
                (LayerSpec::MaxPool { pool }, ActShape::Spatial { height, width, channels }) => {
                    let (h, w) = pooled_dims(height, width, pool.max(1));
                    if pool < 1 || h == 0 || w == 0 {
                        return Err(fail(format!("pool {pool} does not fit {height}x{width}")));
                    }
                    ActShape::Spatial {
                        height: h,
                        width: w,
                        channels,
                    }
                }
                (LayerSpec::Flatten, s @ ActShape::Spatial { .. }) => ActShape::Flat(s.size()),
                (LayerSpec::Dense { width, activation }, ActShape::Flat(_)) => {
                    if width == 0 {
                        return Err(fail("dense width must be >= 1".into()));
                    }
                    let is_last = index == last;
                    match (is_last, activation) {
                        (true, Activation::Softmax) if width == self.class_count => {}
                        (true, _) => {
                            return Err(SpecError::BadOutput {
                                class_count: self.class_count,
                            })
                        }
                        (false, Activation::Tanh) => {}
                        (false, _) => return Err(fail("hidden layers use tanh".into())),
                    }
                    ActShape::Flat(width)
                }
                (l, s) => return Err(fail(format!("{} cannot follow shape {s:?}", l.name()))),
            };
            shapes.push(shape);
        }
        if !matches!(self.layers[last], LayerSpec::Dense { .. }) {
            return Err(SpecError::BadOutput {
                class_count: self.class_count,
            });
        }
        Ok(shapes)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        self.layer_shapes().map(|_| ())
    }

    /// Positions (in `layers`) of the measured layers.
    pub fn recorded_layers(&self) -> Vec<usize> {
        self.layers
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_recorded())
            .map(|(i, _)| i)
            .collect()
    }
}
