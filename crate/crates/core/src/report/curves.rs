//! Per-layer series extracted from a run, and the compression trend check.

use serde::Serialize;

use super::ReportError;
use crate::data::Split;
use crate::experiment::RunResult;

/// Drop (bits) in I(X;T) that counts as a compression phase.
pub const COMPRESSION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct MICurve {
    pub layer: usize,
    pub split: Split,
    /// (epoch, I(X;T), I(Y;T)) with strictly increasing epochs.
    pub points: Vec<(usize, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfoPlaneSeries {
    pub split: Split,
    pub epochs: Vec<usize>,
    /// `layers[l][e]` is (I(X;T), I(Y;T)) of layer `l` at `epochs[e]`.
    pub layers: Vec<Vec<(f64, f64)>>,
}

pub fn mi_curves(result: &RunResult, split: Split) -> Vec<MICurve> {
    let mut curves: Vec<MICurve> = (0..result.layers.len())
        .map(|layer| MICurve {
            layer,
            split,
            points: Vec::new(),
        })
        .collect();
    for r in result.records_for(split) {
        if let Some(c) = curves.get_mut(r.layer) {
            c.points.push((r.epoch, r.i_xt_bits, r.i_ty_bits));
        }
    }
    for c in &mut curves {
        c.points.sort_by_key(|p| p.0);
    }
    curves
}

pub fn info_plane(result: &RunResult, split: Split) -> InfoPlaneSeries {
    let curves = mi_curves(result, split);
    InfoPlaneSeries {
        split,
        epochs: curves.first().map(|c| c.points.iter().map(|p| p.0).collect()).unwrap_or_default(),
        layers: curves
            .iter()
            .map(|c| c.points.iter().map(|&(_, x, y)| (x, y)).collect())
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompressionVerdict {
    pub compression: bool,
    pub drop_bits: f64,
    pub threshold: f64,
}

impl std::fmt::Display for CompressionVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = if self.compression { "compression" } else { "no compression" };
        write!(f, "{v} (drop {:.4} bits, threshold {})", self.drop_bits, self.threshold)
    }
}

/// Largest fall of I(X;T) below its running maximum, measured at the second
/// half of the points. Only point order matters, not epoch values.
pub fn compression_diagnostic(curve: &MICurve, threshold: f64) -> Result<CompressionVerdict, ReportError> {
    let n = curve.points.len();
    if n < 4 {
        return Err(ReportError::TooFewPoints(n));
    }
    let mut running_max = f64::NEG_INFINITY;
    let mut drop: f64 = 0.0;
    for (i, &(_, xt, _)) in curve.points.iter().enumerate() {
        running_max = running_max.max(xt);
        if i >= n / 2 {
            drop = drop.max(running_max - xt);
        }
    }
    Ok(CompressionVerdict {
        compression: drop > threshold,
        drop_bits: drop,
        threshold,
    })
}

/// First epoch at which I(Y;T) reaches `fraction` of the curve's final value.
pub fn first_epoch_reaching(curve: &MICurve, fraction: f64) -> Option<usize> {
    let last = curve.points.last()?.2;
    curve.points.iter().find(|p| p.2 >= fraction * last).map(|p| p.0)
}
