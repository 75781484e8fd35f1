//! Parameters, forward/backward passes, and activation traces for a
//! [`NetworkSpec`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::activation::{softmax_rows, tanh_activation, tanh_backward, Activation};
use super::conv::{conv2d_backward, conv2d_forward};
use super::dense::{dense_backward, dense_forward};
use super::pool::{maxpool2d, maxpool2d_backward};
use super::spec::{LayerSpec, NetworkSpec, SpecError};
use crate::tensor::{ShapeError, Tensor};

#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub weights: Tensor,
    pub bias: Tensor,
}

/// Parameters aligned with `NetworkSpec::layers`; `None` for parameter-free layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub layers: Vec<Option<LayerParams>>,
}

impl Params {
    pub fn tensors(&self) -> impl Iterator<Item = &Tensor> {
        self.layers
            .iter()
            .flatten()
            .flat_map(|p| [&p.weights, &p.bias])
    }

    pub fn slices_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.layers
            .iter_mut()
            .flatten()
            .flat_map(|p| [p.weights.data_mut(), p.bias.data_mut()])
    }

    pub fn count(&self) -> usize {
        self.tensors().map(Tensor::len).sum()
    }

    /// Parameters serialized as raw bits, for determinism checks.
    pub fn bit_pattern(&self) -> Vec<u64> {
        self.tensors()
            .flat_map(|t| t.data().iter().map(|v| v.to_bits()))
            .collect()
    }
}

/// Glorot-uniform weights with zero biases, fully determined by `seed`.
pub fn init_params(net: &NetworkSpec, seed: u64) -> Result<Params, SpecError> {
    let shapes = net.layer_shapes()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prev = net.input();
    let mut layers = Vec::with_capacity(net.layers.len());
    for (layer, &shape) in net.layers.iter().zip(&shapes) {
        let (wshape, fan_in, fan_out) = match (*layer, prev) {
            (LayerSpec::Conv { width, kernel, .. }, super::spec::ActShape::Spatial { channels, .. }) => (
                vec![kernel, kernel, channels, width],
                kernel * kernel * channels,
                kernel * kernel * width,
            ),
            (LayerSpec::Dense { width, .. }, super::spec::ActShape::Flat(d)) => (vec![d, width], d, width),
            _ => {
                layers.push(None);
                prev = shape;
                continue;
            }
        };
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let n: usize = wshape.iter().product();
        let data = (0..n).map(|_| rng.gen_range(-limit..=limit)).collect();
        let units = *wshape.last().unwrap();
        layers.push(Some(LayerParams {
            weights: Tensor::new(wshape, data).expect("weight shape"),
            bias: Tensor::zeros(&[units]),
        }));
        prev = shape;
    }
    Ok(Params { layers })
}

/// Post-activation outputs of the recorded layers for one batch.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    /// Positions in `NetworkSpec::layers`, parallel to `outputs`.
    pub layer_positions: Vec<usize>,
    pub outputs: Vec<Tensor>,
}

impl ForwardTrace {
    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }
}

/// Everything the backward pass needs from a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// `values[0]` is the batch input; `values[i + 1]` is the output of layer `i`.
    pub values: Vec<Tensor>,
    argmax: Vec<Option<Vec<usize>>>,
}

impl ForwardCache {
    pub fn probs(&self) -> &Tensor {
        self.values.last().unwrap()
    }
}

fn activate(x: Tensor, activation: Activation) -> Tensor {
    match activation {
        Activation::Tanh => tanh_activation(&x),
        Activation::Softmax => softmax_rows(&x),
        Activation::Identity => x,
    }
}

pub fn forward(net: &NetworkSpec, params: &Params, batch: &Tensor) -> Result<ForwardCache, ShapeError> {
    let expected = net.input().batch_shape(batch.shape().first().copied().unwrap_or(0));
    if batch.shape() != expected.as_slice() {
        return Err(ShapeError::Invalid {
            op: "forward",
            msg: format!("batch shape {:?} does not match network input {:?}", batch.shape(), net.input_shape),
        });
    }
    let mut values = Vec::with_capacity(net.layers.len() + 1);
    let mut argmax = Vec::with_capacity(net.layers.len());
    values.push(batch.clone());
    for (layer, p) in net.layers.iter().zip(&params.layers) {
        let x = values.last().unwrap();
        let (y, am) = match (*layer, p) {
            (LayerSpec::Conv { activation, .. }, Some(p)) => {
                (activate(conv2d_forward(x, &p.weights, p.bias.data())?, activation), None)
            }
            (LayerSpec::Dense { activation, .. }, Some(p)) => {
                (activate(dense_forward(x, &p.weights, p.bias.data())?, activation), None)
            }
            (LayerSpec::MaxPool { pool }, _) => {
                let pooled = maxpool2d(x, pool)?;
                (pooled.output, Some(pooled.argmax))
            }
            (LayerSpec::Flatten, _) => {
                let n = x.shape()[0];
                let d = x.row_len();
                (x.clone().reshape(vec![n, d])?, None)
            }
            (l, None) => {
                return Err(ShapeError::Invalid {
                    op: "forward",
                    msg: format!("missing parameters for {}", l.name()),
                })
            }
        };
        values.push(y);
        argmax.push(am);
    }
    Ok(ForwardCache { values, argmax })
}

/// Forward pass keeping only the recorded layers' outputs. Returns the trace
/// and the output-layer probabilities.
pub fn forward_with_trace(
    net: &NetworkSpec,
    params: &Params,
    batch: &Tensor,
) -> Result<(ForwardTrace, Tensor), ShapeError> {
    let cache = forward(net, params, batch)?;
    let probs = cache.probs().clone();
    let mut layer_positions = Vec::new();
    let mut outputs = Vec::new();
    for (i, (layer, value)) in net.layers.iter().zip(cache.values.into_iter().skip(1)).enumerate() {
        if layer.is_recorded() {
            layer_positions.push(i);
            outputs.push(value);
        }
    }
    Ok((
        ForwardTrace {
            layer_positions,
            outputs,
        },
        probs,
    ))
}

/// Gradients for every parameter given `grad_logits`, the loss gradient with
/// respect to the final layer's pre-softmax input.
pub fn backward(
    net: &NetworkSpec,
    params: &Params,
    cache: &ForwardCache,
    grad_logits: Tensor,
) -> Result<Params, ShapeError> {
    let n_layers = net.layers.len();
    let mut grads: Vec<Option<LayerParams>> = vec![None; n_layers];
    let mut grad = grad_logits;
    for i in (0..n_layers).rev() {
        let input = &cache.values[i];
        let output = &cache.values[i + 1];
        let layer = net.layers[i];
        let pre_grad = |g: Tensor, act: Activation| match act {
            Activation::Tanh => tanh_backward(&g, output),
            // the final softmax is folded into the loss gradient
            Activation::Softmax | Activation::Identity => g,
        };
        grad = match (layer, &params.layers[i]) {
            (LayerSpec::Conv { activation, .. }, Some(p)) => {
                let g = pre_grad(grad, activation);
                let cg = conv2d_backward(&g, input, &p.weights)?;
                grads[i] = Some(LayerParams {
                    weights: cg.weights,
                    bias: Tensor::new(vec![cg.bias.len()], cg.bias)?,
                });
                cg.input
            }
            (LayerSpec::Dense { activation, .. }, Some(p)) => {
                let g = pre_grad(grad, activation);
                let dg = dense_backward(&g, input, &p.weights)?;
                grads[i] = Some(LayerParams {
                    weights: dg.weights,
                    bias: Tensor::new(vec![dg.bias.len()], dg.bias)?,
                });
                dg.input
            }
            (LayerSpec::MaxPool { .. }, _) => {
                let am = cache.argmax[i].as_ref().expect("pool cache");
                maxpool2d_backward(&grad, am, input.shape())?
            }
            (LayerSpec::Flatten, _) => grad.reshape(input.shape().to_vec())?,
            (l, None) => {
                return Err(ShapeError::Invalid {
                    op: "backward",
                    msg: format!("missing parameters for {}", l.name()),
                })
            }
        };
    }
    Ok(Params { layers: grads })
}
