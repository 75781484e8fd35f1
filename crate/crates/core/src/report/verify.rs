//! Re-checks a stored run: record structure, MI bounds, DPI and compression.

use std::collections::BTreeSet;

use super::curves::{compression_diagnostic, mi_curves, CompressionVerdict, COMPRESSION_THRESHOLD};
use crate::data::Split;
use crate::experiment::{RunResult, DPI_TOLERANCE};
use crate::mi::{dpi_diagnostic, DpiViolation};

const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    /// Missing or duplicated records and other shape problems.
    pub structure: Vec<String>,
    /// MI values outside their information-theoretic bounds.
    pub bounds: Vec<String>,
    pub dpi_warnings: Vec<DpiViolation>,
    pub compression: Vec<(Split, usize, CompressionVerdict)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.structure.is_empty() && self.bounds.is_empty()
    }
}

pub fn verify_result(result: &RunResult) -> VerifyReport {
    let mut rep = VerifyReport::default();
    let layers = result.layers.len();
    let epochs = &result.config.schedule.measurement_epochs;
    if layers == 0 {
        rep.structure.push("result lists no recorded layers".into());
    }
    let expected = layers * epochs.len() * Split::BOTH.len();
    if result.records.len() != expected {
        rep.structure.push(format!(
            "{} MI records, expected {layers} layers x {} epochs x 2 splits = {expected}",
            result.records.len(),
            epochs.len()
        ));
    }
    let mut seen = BTreeSet::new();
    for r in &result.records {
        if !seen.insert((r.epoch, r.layer, r.split)) {
            rep.structure.push(format!("duplicate record: epoch {} layer {} {}", r.epoch, r.layer, r.split));
        }
        if r.layer >= layers {
            rep.structure.push(format!("record names layer {} of {layers}", r.layer));
        }
        if !epochs.contains(&r.epoch) {
            rep.structure.push(format!("record at unscheduled epoch {}", r.epoch));
        }
    }
    for &e in epochs {
        for l in 0..layers {
            for s in Split::BOTH {
                if !seen.contains(&(e, l, s)) {
                    rep.structure.push(format!("missing record: epoch {e} layer {l} {s}"));
                }
            }
        }
        if result.metrics_at(e).is_none() {
            rep.structure.push(format!("no accuracy/loss at epoch {e}"));
        }
    }

    for s in Split::BOTH {
        let Some(reference) = result.reference(s) else {
            rep.structure.push(format!("no reference entropies for the {s} split"));
            continue;
        };
        let h_max = (reference.samples as f64).log2();
        if !(reference.h_x_bits >= 0.0 && reference.h_x_bits <= h_max + BOUND_SLACK) {
            rep.bounds.push(format!("{s}: H(X) = {} outside [0, {h_max}]", reference.h_x_bits));
        }
        if !(reference.h_y_bits >= 0.0 && reference.h_y_bits <= h_max + BOUND_SLACK) {
            rep.bounds.push(format!("{s}: H(Y) = {} outside [0, {h_max}]", reference.h_y_bits));
        }
        for r in result.records_for(s) {
            let at = format!("epoch {} layer {} {s}", r.epoch, r.layer);
            if r.samples != reference.samples {
                rep.structure.push(format!("{at}: {} samples, split has {}", r.samples, reference.samples));
            }
            if r.distinct_codes > r.samples {
                rep.bounds.push(format!("{at}: {} distinct codes among {} samples", r.distinct_codes, r.samples));
            }
            if !(r.i_xt_bits >= 0.0 && r.i_xt_bits <= h_max + BOUND_SLACK) {
                rep.bounds.push(format!("{at}: I(X;T) = {} outside [0, log2 N = {h_max}]", r.i_xt_bits));
            }
            let ty_max = r.i_xt_bits.min(reference.h_y_bits) + BOUND_SLACK;
            if !(r.i_ty_bits >= 0.0 && r.i_ty_bits <= ty_max) {
                rep.bounds.push(format!(
                    "{at}: I(Y;T) = {} outside [0, min(I(X;T), H(Y)) = {}]",
                    r.i_ty_bits,
                    ty_max - BOUND_SLACK
                ));
            }
        }
        for c in mi_curves(result, s) {
            if let Ok(v) = compression_diagnostic(&c, COMPRESSION_THRESHOLD) {
                rep.compression.push((s, c.layer, v));
            }
        }
    }
    rep.dpi_warnings = dpi_diagnostic(&result.records, DPI_TOLERANCE);
    rep
}
