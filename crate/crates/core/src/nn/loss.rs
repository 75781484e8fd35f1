use thiserror::Error;

use crate::tensor::{expect_dim, expect_rank, ShapeError, Tensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LossError {
    #[error("label {label} at sample {index} is outside [0, {classes})")]
    LabelOutOfRange {
        index: usize,
        label: usize,
        classes: usize,
    },
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Mean negative log-likelihood (natural log) and its gradient with respect
/// to the pre-softmax logits, `(probs − onehot) / N`.
pub fn cross_entropy_loss(probs: &Tensor, labels: &[u8]) -> Result<(f64, Tensor), LossError> {
    expect_rank("cross_entropy_loss", probs, 2)?;
    let (n, c) = (probs.shape()[0], probs.shape()[1]);
    expect_dim("cross_entropy_loss", "labels", n, labels.len())?;
    let mut grad = probs.clone();
    let scale = 1.0 / n as f64;
    let mut loss = 0.0;
    for (i, (row, &label)) in grad.data_mut().chunks_mut(c).zip(labels).enumerate() {
        let label = label as usize;
        if label >= c {
            return Err(LossError::LabelOutOfRange {
                index: i,
                label,
                classes: c,
            });
        }
        loss -= row[label].max(f64::MIN_POSITIVE).ln();
        row[label] -= 1.0;
        for g in row.iter_mut() {
            *g *= scale;
        }
    }
    Ok((loss * scale, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_prediction_costs_nothing() {
        let p = Tensor::new(vec![1, 3], vec![0.0, 1.0, 0.0]).unwrap();
        let (loss, _) = cross_entropy_loss(&p, &[1]).unwrap();
        assert_eq!(loss, 0.0);
    }

    #[test]
    fn uniform_over_ten_classes() {
        let p = Tensor::filled(&[4, 10], 0.1);
        let (loss, grad) = cross_entropy_loss(&p, &[0, 3, 9, 5]).unwrap();
        assert!((loss - 10f64.ln()).abs() < 1e-12);
        assert!((loss - 2.302585).abs() < 1e-6);
        assert!((grad.get(&[1, 3]) - (0.1 - 1.0) / 4.0).abs() < 1e-15);
        assert!((grad.get(&[1, 4]) - 0.1 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn label_out_of_range() {
        let p = Tensor::filled(&[1, 10], 0.1);
        assert!(matches!(
            cross_entropy_loss(&p, &[10]),
            Err(LossError::LabelOutOfRange { label: 10, .. })
        ));
    }
}
