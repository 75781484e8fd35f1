//! Fully connected affine layer.

use super::gemm::{gemm, Mat};
use crate::tensor::{expect_dim, expect_rank, ShapeError, Tensor};

#[derive(Debug, Clone)]
pub struct DenseGrads {
    pub input: Tensor,
    pub weights: Tensor,
    pub bias: Vec<f64>,
}

/// `input[N,D] · weights[D,U] + bias[U]`.
pub fn dense_forward(input: &Tensor, weights: &Tensor, bias: &[f64]) -> Result<Tensor, ShapeError> {
    let op = "dense_forward";
    expect_rank(op, input, 2)?;
    expect_rank(op, weights, 2)?;
    let (n, d) = (input.shape()[0], input.shape()[1]);
    expect_dim(op, "input features", weights.shape()[0], d)?;
    let u = weights.shape()[1];
    expect_dim(op, "bias length", u, bias.len())?;
    let mut out = Tensor::zeros(&[n, u]);
    for orow in out.data_mut().chunks_mut(u) {
        orow.copy_from_slice(bias);
    }
    gemm(Mat::row_major(input.data(), n, d), Mat::row_major(weights.data(), d, u), 1.0, out.data_mut());
    Ok(out)
}

pub fn dense_backward(grad_out: &Tensor, input: &Tensor, weights: &Tensor) -> Result<DenseGrads, ShapeError> {
    let op = "dense_backward";
    expect_rank(op, grad_out, 2)?;
    expect_rank(op, input, 2)?;
    let (n, d) = (input.shape()[0], input.shape()[1]);
    expect_dim(op, "input features", weights.shape()[0], d)?;
    let u = weights.shape()[1];
    expect_dim(op, "batch", n, grad_out.shape()[0])?;
    expect_dim(op, "units", u, grad_out.shape()[1])?;
    let go = Mat::row_major(grad_out.data(), n, u);
    let mut gin = Tensor::zeros(&[n, d]);
    let mut gw = Tensor::zeros(&[d, u]);
    let mut gb = vec![0.0; u];
    for grow in grad_out.data().chunks(u) {
        for (b, &g) in gb.iter_mut().zip(grow) {
            *b += g;
        }
    }
    gemm(go, Mat::row_major(weights.data(), d, u).t(), 0.0, gin.data_mut());
    gemm(Mat::row_major(input.data(), n, d).t(), go, 0.0, gw.data_mut());
    Ok(DenseGrads {
        input: gin,
        weights: gw,
        bias: gb,
    })
}
