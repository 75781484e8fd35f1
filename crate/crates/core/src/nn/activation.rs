use serde::{Deserialize, Serialize};

use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Softmax,
    Identity,
}

pub fn tanh_activation(x: &Tensor) -> Tensor {
    x.map(f64::tanh)
}

/// Gradient through `tanh` given the forward output `y`: `grad · (1 − y²)`.
pub fn tanh_backward(grad: &Tensor, output: &Tensor) -> Tensor {
    let mut g = grad.clone();
    for (gv, &y) in g.data_mut().iter_mut().zip(output.data()) {
        *gv *= 1.0 - y * y;
    }
    g
}

/// Max-subtracted softmax of one row.
pub fn softmax(x: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    softmax_in_place(&mut out);
    out
}

pub(crate) fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// Row-wise softmax of an `[N, C]` tensor.
pub fn softmax_rows(x: &Tensor) -> Tensor {
    let mut out = x.clone();
    let c = x.row_len();
    for row in out.data_mut().chunks_mut(c) {
        softmax_in_place(row);
    }
    out
}
