//! Fixed-width binning of layer activations and 128-bit fingerprints of the
//! resulting bin-index vectors.

use serde::{Deserialize, Deserializer, Serialize};
use xxhash_rust::xxh3::xxh3_128;

use super::MiError;
use crate::tensor::Tensor;

pub const DEFAULT_BIN_SIZE: f64 = 0.67;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    #[serde(default = "default_bin_size", deserialize_with = "positive_bin_size")]
    pub bin_size: f64,
}

fn default_bin_size() -> f64 {
    DEFAULT_BIN_SIZE
}

fn positive_bin_size<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let v = f64::deserialize(d)?;
    EstimatorConfig::new(v).map(|c| c.bin_size).map_err(serde::de::Error::custom)
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            bin_size: DEFAULT_BIN_SIZE,
        }
    }
}

impl EstimatorConfig {
    pub fn new(bin_size: f64) -> Result<Self, MiError> {
        if bin_size > 0.0 && bin_size.is_finite() {
            Ok(Self { bin_size })
        } else {
            Err(MiError::BadBinSize(bin_size))
        }
    }
}

/// Discrete symbol standing for one sample's binned activation vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinnedCode(pub u128);

#[inline]
fn bin_one(v: f64, bin_size: f64) -> i64 {
    (v / bin_size).floor() as i64
}

/// `floor(h_i / bin_size)` elementwise.
pub fn bin_activations(h: &[f64], bin_size: f64) -> Result<Vec<i64>, MiError> {
    h.iter()
        .enumerate()
        .map(|(position, &v)| {
            if v.is_finite() {
                Ok(bin_one(v, bin_size))
            } else {
                Err(MiError::NonFinite {
                    layer: None,
                    epoch: None,
                    position,
                })
            }
        })
        .collect()
}

pub fn fingerprint(bins: &[i64]) -> BinnedCode {
    let mut bytes = Vec::with_capacity(bins.len() * 8);
    for b in bins {
        bytes.extend_from_slice(&b.to_le_bytes());
    }
    BinnedCode(xxh3_128(&bytes))
}

/// Per-sample vectors `h`: for spatial activations `[N, H, W, C]` each
/// channel's image is read out row-major and the channels are concatenated in
/// order; `[N, U]` rows pass through.
pub fn flatten_layer(t: &Tensor) -> Vec<Vec<f64>> {
    let n = t.shape()[0];
    let mut out = Vec::with_capacity(n);
    let mut buf = Vec::new();
    for s in 0..n {
        flatten_sample(t, s, &mut buf);
        out.push(buf.clone());
    }
    out
}

pub(crate) fn flatten_sample(t: &Tensor, sample: usize, out: &mut Vec<f64>) {
    let row = t.row(sample);
    out.clear();
    match t.shape() {
        [_, h, w, c] => {
            let (h, w, c) = (*h, *w, *c);
            for ch in 0..c {
                for y in 0..h {
                    for x in 0..w {
                        out.push(row[(y * w + x) * c + ch]);
                    }
                }
            }
        }
        _ => out.extend_from_slice(row),
    }
}

/// Bins and fingerprints one sample of a batch tensor in a single pass.
/// `bins` and `bytes` are caller-provided scratch space.
pub(crate) fn code_for_sample(
    t: &Tensor,
    sample: usize,
    bin_size: f64,
    flat: &mut Vec<f64>,
    bins: &mut Vec<i64>,
    bytes: &mut Vec<u8>,
) -> Result<BinnedCode, usize> {
    flatten_sample(t, sample, flat);
    bins.clear();
    bytes.clear();
    for (position, &v) in flat.iter().enumerate() {
        if !v.is_finite() {
            return Err(position);
        }
        let b = bin_one(v, bin_size);
        bins.push(b);
        bytes.extend_from_slice(&b.to_le_bytes());
    }
    Ok(BinnedCode(xxh3_128(bytes)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binning_examples() {
        assert_eq!(bin_activations(&[0.0, 0.0, 0.0], 0.67).unwrap(), vec![0, 0, 0]);
        assert_eq!(bin_activations(&[0.5, -0.5, 1.0], 0.67).unwrap(), vec![0, -1, 1]);
        assert_eq!(bin_activations(&[-0.0, 0.67, -1.0], 0.67).unwrap(), vec![0, 1, -2]);
    }

    #[test]
    fn non_finite_names_position() {
        let err = bin_activations(&[0.1, f64::NAN], 0.67).unwrap_err();
        assert!(matches!(err, MiError::NonFinite { position: 1, .. }));
    }

    #[test]
    fn fingerprint_is_pure() {
        let a = bin_activations(&[0.3, -0.9, 0.99], 0.67).unwrap();
        let b = bin_activations(&[0.3, -0.9, 0.99], 0.67).unwrap();
        assert_eq!(fingerprint(&a), fingerprint(&b));
        assert_ne!(fingerprint(&a), fingerprint(&[0, -2, 2]));
    }

    #[test]
    fn bad_bin_size() {
        assert!(EstimatorConfig::new(0.0).is_err());
        assert!(EstimatorConfig::new(-0.67).is_err());
        assert!(EstimatorConfig::new(f64::NAN).is_err());
        assert_eq!(EstimatorConfig::default().bin_size, 0.67);
    }

    #[test]
    fn flatten_orders_channels_first() {
        // one sample, 2x2 image, 2 channels: NHWC data
        let t = Tensor::new(vec![1, 2, 2, 2], vec![1.0, 10.0, 2.0, 20.0, 3.0, 30.0, 4.0, 40.0]).unwrap();
        assert_eq!(flatten_layer(&t), vec![vec![1.0, 2.0, 3.0, 4.0, 10.0, 20.0, 30.0, 40.0]]);
        let single = Tensor::new(vec![1, 2, 2, 1], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(flatten_layer(&single), vec![vec![1.0, 2.0, 3.0, 4.0]]);
        let dense = Tensor::new(vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(flatten_layer(&dense), vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
    }

    #[test]
    fn streaming_code_matches_two_step_path() {
        let t = Tensor::new(vec![2, 1, 2, 2], vec![0.1, -0.7, 0.9, 0.2, -0.3, 0.5, 0.68, -0.99]).unwrap();
        let (mut f, mut b, mut y) = (Vec::new(), Vec::new(), Vec::new());
        for (s, h) in flatten_layer(&t).iter().enumerate() {
            let code = code_for_sample(&t, s, 0.67, &mut f, &mut b, &mut y).unwrap();
            assert_eq!(code, fingerprint(&bin_activations(h, 0.67).unwrap()));
        }
    }
}
