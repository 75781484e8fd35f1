//! Streaming per-layer measurement over an evaluation split.
//!
//! Samples are binned and fingerprinted as soon as their batch trace is
//! observed; only the 128-bit codes are retained between batches.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_128;

use super::binning::{code_for_sample, BinnedCode, EstimatorConfig};
use super::entropy::{mi_t_y, mi_x_t, LabelDistribution};
use super::MiError;
use crate::data::Split;
use crate::nn::ForwardTrace;
use crate::tensor::Tensor;

/// One point on the information plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMIRecord {
    pub epoch: usize,
    /// Ordinal among recorded layers (0 = first conv layer).
    pub layer: usize,
    pub split: Split,
    pub i_xt_bits: f64,
    pub i_ty_bits: f64,
    /// Number of distinct binned codes among `samples`.
    pub distinct_codes: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureContext {
    pub epoch: usize,
    pub split: Split,
}

#[derive(Debug, Default)]
struct LayerCodes {
    codes: Vec<BinnedCode>,
    /// Exact bin vectors keyed by fingerprint, kept only when auditing.
    audit: Option<HashMap<BinnedCode, Vec<i64>>>,
    collisions: usize,
}

#[derive(Debug)]
pub struct SplitMeasurement {
    ctx: MeasureContext,
    bin_size: f64,
    layers: Vec<LayerCodes>,
    flat: Vec<f64>,
    bins: Vec<i64>,
    bytes: Vec<u8>,
}

impl SplitMeasurement {
    pub fn new(ctx: MeasureContext, layer_count: usize, config: EstimatorConfig) -> Self {
        Self {
            ctx,
            bin_size: config.bin_size,
            layers: (0..layer_count).map(|_| LayerCodes::default()).collect(),
            flat: Vec::new(),
            bins: Vec::new(),
            bytes: Vec::new(),
        }
    }

    /// Retains exact bin vectors to detect fingerprint collisions. Memory grows
    /// with samples × layer width; meant for runs of at most ~10^4 samples.
    pub fn with_audit(mut self) -> Self {
        for l in &mut self.layers {
            l.audit = Some(HashMap::new());
        }
        self
    }

    pub fn observe(&mut self, trace: &ForwardTrace) -> Result<(), MiError> {
        if trace.len() != self.layers.len() {
            return Err(MiError::LayerCount {
                expected: self.layers.len(),
                found: trace.len(),
            });
        }
        for (layer, (acc, out)) in self.layers.iter_mut().zip(&trace.outputs).enumerate() {
            observe_layer(
                acc,
                out,
                self.bin_size,
                (&mut self.flat, &mut self.bins, &mut self.bytes),
            )
            .map_err(|position| MiError::NonFinite {
                layer: Some(layer),
                epoch: Some(self.ctx.epoch),
                position,
            })?;
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        self.layers.first().map_or(0, |l| l.codes.len())
    }

    /// Fingerprint collisions found by the audit (always 0 without one).
    pub fn collisions(&self) -> usize {
        self.layers.iter().map(|l| l.collisions).sum()
    }

    pub fn codes(&self, layer: usize) -> &[BinnedCode] {
        &self.layers[layer].codes
    }

    pub fn finish(&self, labels: &[u8], class_count: usize) -> Result<Vec<EpochMIRecord>, MiError> {
        let dist = LabelDistribution::from_labels(labels, class_count);
        self.layers
            .iter()
            .enumerate()
            .map(|(layer, acc)| {
                let codes = &acc.codes;
                Ok(EpochMIRecord {
                    epoch: self.ctx.epoch,
                    layer,
                    split: self.ctx.split,
                    i_xt_bits: mi_x_t(codes)?,
                    i_ty_bits: mi_t_y(codes, labels, &dist)?,
                    distinct_codes: distinct(codes),
                    samples: codes.len(),
                })
            })
            .collect()
    }
}

fn observe_layer(
    acc: &mut LayerCodes,
    out: &Tensor,
    bin_size: f64,
    (flat, bins, bytes): (&mut Vec<f64>, &mut Vec<i64>, &mut Vec<u8>),
) -> Result<(), usize> {
    for s in 0..out.shape()[0] {
        let code = code_for_sample(out, s, bin_size, flat, bins, bytes)?;
        if let Some(audit) = acc.audit.as_mut() {
            match audit.get(&code) {
                Some(seen) if seen != bins => acc.collisions += 1,
                Some(_) => {}
                None => {
                    audit.insert(code, bins.clone());
                }
            }
        }
        acc.codes.push(code);
    }
    Ok(())
}

fn distinct(codes: &[BinnedCode]) -> usize {
    let mut sorted = codes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len()
}

/// Measures every recorded layer of a single trace covering the whole split.
pub fn measure_layers(
    trace: &ForwardTrace,
    labels: &[u8],
    class_count: usize,
    config: EstimatorConfig,
    ctx: MeasureContext,
) -> Result<Vec<EpochMIRecord>, MiError> {
    let mut m = SplitMeasurement::new(ctx, trace.len(), config);
    m.observe(trace)?;
    if m.samples() != labels.len() {
        return Err(MiError::LengthMismatch {
            codes: m.samples(),
            labels: labels.len(),
        });
    }
    m.finish(labels, class_count)
}

/// Entropy of the raw inputs treated as discrete symbols (exact pixel
/// values), with the number of distinct images.
pub fn input_entropy(images: &Tensor) -> (f64, usize) {
    let codes: Vec<u128> = (0..images.shape()[0])
        .map(|i| {
            let bytes: Vec<u8> = images.row(i).iter().flat_map(|v| v.to_bits().to_le_bytes()).collect();
            xxh3_128(&bytes)
        })
        .collect();
    let h = mi_x_t(&codes).unwrap_or(0.0);
    let mut sorted = codes;
    sorted.sort_unstable();
    sorted.dedup();
    (h, sorted.len())
}
