//! Non-overlapping max pooling (stride equals the window size).
//!
//! Trailing rows/columns that do not fill a whole window are dropped. Ties go
//! to the first maximum in row-major window order.

use crate::tensor::{expect_rank, ShapeError, Tensor};

#[derive(Debug, Clone)]
pub struct Pooled {
    pub output: Tensor,
    /// Flat input offset of the selected element, one per output element.
    pub argmax: Vec<usize>,
}

pub fn pooled_dims(h: usize, w: usize, pool: usize) -> (usize, usize) {
    (h / pool, w / pool)
}

pub fn maxpool2d(input: &Tensor, pool: usize) -> Result<Pooled, ShapeError> {
    let op = "maxpool2d";
    expect_rank(op, input, 4)?;
    let [n, h, w, c]: [usize; 4] = input.shape().try_into().unwrap();
    let (oh, ow) = pooled_dims(h, w, pool);
    if pool == 0 || oh == 0 || ow == 0 {
        return Err(ShapeError::Invalid {
            op,
            msg: format!("pool size {pool} does not fit a {h}x{w} input"),
        });
    }
    let x = input.data();
    let mut out = Tensor::zeros(&[n, oh, ow, c]);
    let mut argmax = vec![0usize; out.len()];
    let o = out.data_mut();
    for b in 0..n {
        for oy in 0..oh {
            for ox in 0..ow {
                for ch in 0..c {
                    let mut best = f64::NEG_INFINITY;
                    let mut best_at = usize::MAX;
                    for py in 0..pool {
                        for px in 0..pool {
                            let at = ((b * h + oy * pool + py) * w + ox * pool + px) * c + ch;
                            if x[at] > best || best_at == usize::MAX {
                                best = x[at];
                                best_at = at;
                            }
                        }
                    }
                    let oat = ((b * oh + oy) * ow + ox) * c + ch;
                    o[oat] = best;
                    argmax[oat] = best_at;
                }
            }
        }
    }
    Ok(Pooled { output: out, argmax })
}

pub fn maxpool2d_backward(
    grad_out: &Tensor,
    argmax: &[usize],
    input_shape: &[usize],
) -> Result<Tensor, ShapeError> {
    if grad_out.len() != argmax.len() {
        return Err(ShapeError::Invalid {
            op: "maxpool2d_backward",
            msg: format!(
                "gradient has {} elements but {} were pooled",
                grad_out.len(),
                argmax.len()
            ),
        });
    }
    let mut gin = Tensor::zeros(input_shape);
    let gi = gin.data_mut();
    for (&g, &at) in grad_out.data().iter().zip(argmax) {
        gi[at] += g;
    }
    Ok(gin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_by_two_window() {
        let t = Tensor::new(vec![1, 2, 2, 1], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let p = maxpool2d(&t, 2).unwrap();
        assert_eq!(p.output.shape(), &[1, 1, 1, 1]);
        assert_eq!(p.output.data(), &[4.0]);
    }

    #[test]
    fn constant_input() {
        let t = Tensor::filled(&[2, 4, 4, 3], -0.25);
        let p = maxpool2d(&t, 2).unwrap();
        assert!(p.output.data().iter().all(|&v| v == -0.25));
    }

    #[test]
    fn window_max_matches_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = Tensor::new(
            vec![2, 6, 6, 2],
            (0..144).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let p = maxpool2d(&t, 2).unwrap();
        for b in 0..2 {
            for oy in 0..3 {
                for ox in 0..3 {
                    for c in 0..2 {
                        let mut m = f64::NEG_INFINITY;
                        for dy in 0..2 {
                            for dx in 0..2 {
                                m = m.max(t.get(&[b, 2 * oy + dy, 2 * ox + dx, c]));
                            }
                        }
                        assert_eq!(p.output.get(&[b, oy, ox, c]), m);
                    }
                }
            }
        }
    }

    #[test]
    fn odd_dims_truncate_trailing_row_and_column() {
        let t = Tensor::new(vec![1, 3, 3, 1], vec![0.0, 1.0, 9.0, 2.0, 3.0, 9.0, 9.0, 9.0, 9.0]).unwrap();
        let p = maxpool2d(&t, 2).unwrap();
        assert_eq!(p.output.data(), &[3.0]);
    }

    #[test]
    fn ties_route_gradient_to_first_maximum() {
        let t = Tensor::filled(&[1, 2, 2, 1], 1.0);
        let p = maxpool2d(&t, 2).unwrap();
        let g = maxpool2d_backward(&Tensor::filled(&[1, 1, 1, 1], 5.0), &p.argmax, t.shape()).unwrap();
        assert_eq!(g.data(), &[5.0, 0.0, 0.0, 0.0]);
    }
}
