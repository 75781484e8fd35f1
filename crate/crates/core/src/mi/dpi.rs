//! Layer-to-layer data-processing check.
//!
//! Each layer is binned independently, so the estimates can break the
//! inequality even when the true quantities obey it. Violations are reported,
//! never raised.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::measure::EpochMIRecord;
use crate::data::Split;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "I(X;T)")]
    InputInfo,
    #[serde(rename = "I(Y;T)")]
    LabelInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpiViolation {
    pub epoch: usize,
    pub split: Split,
    pub quantity: Quantity,
    pub from_layer: usize,
    pub to_layer: usize,
    pub upstream_bits: f64,
    pub downstream_bits: f64,
}

impl std::fmt::Display for DpiViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let q = match self.quantity {
            Quantity::InputInfo => "I(X;T)",
            Quantity::LabelInfo => "I(Y;T)",
        };
        write!(
            f,
            "epoch {} {}: {q} rises from layer {} ({:.6} bits) to layer {} ({:.6} bits)",
            self.epoch, self.split, self.from_layer, self.upstream_bits, self.to_layer, self.downstream_bits
        )
    }
}

/// Every adjacent layer pair where a downstream estimate exceeds the upstream
/// one by more than `tolerance`, per (epoch, split).
pub fn dpi_diagnostic(records: &[EpochMIRecord], tolerance: f64) -> Vec<DpiViolation> {
    let mut groups: BTreeMap<(usize, Split), Vec<&EpochMIRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.epoch, r.split)).or_default().push(r);
    }
    let mut out = Vec::new();
    for ((epoch, split), mut rs) in groups {
        rs.sort_by_key(|r| r.layer);
        for pair in rs.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            for (quantity, up, down) in [
                (Quantity::InputInfo, a.i_xt_bits, b.i_xt_bits),
                (Quantity::LabelInfo, a.i_ty_bits, b.i_ty_bits),
            ] {
                if down > up + tolerance {
                    out.push(DpiViolation {
                        epoch,
                        split,
                        quantity,
                        from_layer: a.layer,
                        to_layer: b.layer,
                        upstream_bits: up,
                        downstream_bits: down,
                    });
                }
            }
        }
    }
    out
}
