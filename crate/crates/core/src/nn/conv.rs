//! Same-padded, stride-1 2-D convolution over NHWC tensors.
//!
//! Weights are laid out `[K, K, Cin, Cout]` so that the innermost loop of both
//! passes runs over the contiguous output-channel axis.

use super::gemm::{gemm, Mat};
use crate::tensor::{expect_dim, expect_rank, ShapeError, Tensor};

#[derive(Debug, Clone)]
pub struct ConvGrads {
    pub input: Tensor,
    pub weights: Tensor,
    pub bias: Vec<f64>,
}

struct Geometry {
    n: usize,
    h: usize,
    w: usize,
    cin: usize,
    cout: usize,
    k: usize,
    pad: usize,
}

fn geometry(
    op: &'static str,
    input: &Tensor,
    weights: &Tensor,
) -> Result<Geometry, ShapeError> {
    expect_rank(op, input, 4)?;
    expect_rank(op, weights, 4)?;
    let (n, h, w, cin) = (
        input.shape()[0],
        input.shape()[1],
        input.shape()[2],
        input.shape()[3],
    );
    let ws = weights.shape();
    let k = ws[0];
    expect_dim(op, "kernel width", k, ws[1])?;
    if k % 2 == 0 {
        return Err(ShapeError::Invalid {
            op,
            msg: format!("kernel size must be odd for same padding, got {k}"),
        });
    }
    expect_dim(op, "input channels", ws[2], cin)?;
    Ok(Geometry {
        n,
        h,
        w,
        cin,
        cout: ws[3],
        k,
        pad: k / 2,
    })
}

/// Fills `col` (`H·W × K·K·Cin`) with the zero-padded receptive field of
/// every output pixel of sample `n`.
fn im2col(g: &Geometry, x: &[f64], n: usize, col: &mut [f64]) {
    let kkc = g.k * g.k * g.cin;
    col.fill(0.0);
    for y in 0..g.h {
        for xo in 0..g.w {
            let row = &mut col[(y * g.w + xo) * kkc..(y * g.w + xo + 1) * kkc];
            for ky in 0..g.k {
                let Some(iy) = (y + ky).checked_sub(g.pad).filter(|&v| v < g.h) else {
                    continue;
                };
                for kx in 0..g.k {
                    let Some(ix) = (xo + kx).checked_sub(g.pad).filter(|&v| v < g.w) else {
                        continue;
                    };
                    let ibase = ((n * g.h + iy) * g.w + ix) * g.cin;
                    let cbase = (ky * g.k + kx) * g.cin;
                    row[cbase..cbase + g.cin].copy_from_slice(&x[ibase..ibase + g.cin]);
                }
            }
        }
    }
}

/// Adds each receptive-field gradient in `col` back onto sample `n` of `gi`.
fn col2im(g: &Geometry, col: &[f64], n: usize, gi: &mut [f64]) {
    let kkc = g.k * g.k * g.cin;
    for y in 0..g.h {
        for xo in 0..g.w {
            let row = &col[(y * g.w + xo) * kkc..(y * g.w + xo + 1) * kkc];
            for ky in 0..g.k {
                let Some(iy) = (y + ky).checked_sub(g.pad).filter(|&v| v < g.h) else {
                    continue;
                };
                for kx in 0..g.k {
                    let Some(ix) = (xo + kx).checked_sub(g.pad).filter(|&v| v < g.w) else {
                        continue;
                    };
                    let ibase = ((n * g.h + iy) * g.w + ix) * g.cin;
                    let cbase = (ky * g.k + kx) * g.cin;
                    for (d, &v) in gi[ibase..ibase + g.cin].iter_mut().zip(&row[cbase..cbase + g.cin]) {
                        *d += v;
                    }
                }
            }
        }
    }
}

pub fn conv2d_forward(input: &Tensor, weights: &Tensor, bias: &[f64]) -> Result<Tensor, ShapeError> {
    let g = geometry("conv2d_forward", input, weights)?;
    expect_dim("conv2d_forward", "bias length", g.cout, bias.len())?;
    let hw = g.h * g.w;
    let kkc = g.k * g.k * g.cin;
    let mut out = Tensor::zeros(&[g.n, g.h, g.w, g.cout]);
    let mut col = vec![0.0; hw * kkc];
    let w = Mat::row_major(weights.data(), kkc, g.cout);
    for (n, o) in out.data_mut().chunks_mut(hw * g.cout).enumerate() {
        im2col(&g, input.data(), n, &mut col);
        for px in o.chunks_mut(g.cout) {
            px.copy_from_slice(bias);
        }
        gemm(Mat::row_major(&col, hw, kkc), w, 1.0, o);
    }
    Ok(out)
}

pub fn conv2d_backward(
    grad_out: &Tensor,
    input: &Tensor,
    weights: &Tensor,
) -> Result<ConvGrads, ShapeError> {
    let op = "conv2d_backward";
    let g = geometry(op, input, weights)?;
    expect_rank(op, grad_out, 4)?;
    let gs = grad_out.shape();
    expect_dim(op, "batch", g.n, gs[0])?;
    expect_dim(op, "height", g.h, gs[1])?;
    expect_dim(op, "width", g.w, gs[2])?;
    expect_dim(op, "output channels", g.cout, gs[3])?;

    let hw = g.h * g.w;
    let kkc = g.k * g.k * g.cin;
    let mut gin = Tensor::zeros(input.shape());
    let mut gw = Tensor::zeros(weights.shape());
    let mut gb = vec![0.0; g.cout];
    let mut col = vec![0.0; hw * kkc];
    let mut gcol = vec![0.0; hw * kkc];
    let w = Mat::row_major(weights.data(), kkc, g.cout);
    for (n, go) in grad_out.data().chunks(hw * g.cout).enumerate() {
        if go.iter().all(|&v| v == 0.0) {
            continue;
        }
        for px in go.chunks(g.cout) {
            for (b, &v) in gb.iter_mut().zip(px) {
                *b += v;
            }
        }
        let go = Mat::row_major(go, hw, g.cout);
        im2col(&g, input.data(), n, &mut col);
        gemm(Mat::row_major(&col, hw, kkc).t(), go, 1.0, gw.data_mut());
        gemm(go, w.t(), 0.0, &mut gcol);
        col2im(&g, &gcol, n, gin.data_mut());
    }
    Ok(ConvGrads {
        input: gin,
        weights: gw,
        bias: gb,
    })
}
