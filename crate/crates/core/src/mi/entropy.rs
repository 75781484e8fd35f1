//! Plug-in (empirical-frequency) entropies and mutual information, in bits.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::MiError;

/// `H = log2 N − (1/N) Σ c log2 c` over the counts, summed in the given order.
///
/// Singleton counts contribute exactly zero, so an all-distinct multiset
/// yields `log2 N` with no rounding.
pub fn entropy_from_counts(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 || counts.iter().filter(|&&c| c > 0).count() <= 1 {
        return 0.0;
    }
    let n = total as f64;
    let weighted: f64 = counts
        .iter()
        .filter(|&&c| c > 1)
        .map(|&c| c as f64 * (c as f64).log2())
        .sum();
    (n.log2() - weighted / n).clamp(0.0, n.log2())
}

/// Symbol counts, sorted so the result does not depend on hash order.
pub fn sorted_counts<T: Hash + Eq>(symbols: impl IntoIterator<Item = T>) -> Vec<usize> {
    let mut map: HashMap<T, usize> = HashMap::new();
    for s in symbols {
        *map.entry(s).or_default() += 1;
    }
    let mut counts: Vec<usize> = map.into_values().collect();
    counts.sort_unstable();
    counts
}

pub fn plug_in_entropy<T: Hash + Eq>(symbols: &[T]) -> Result<f64, MiError> {
    if symbols.is_empty() {
        return Err(MiError::Empty);
    }
    Ok(entropy_from_counts(&sorted_counts(symbols)))
}

/// `I(X;T) = H(T)`: the network is deterministic, so `H(T|X) = 0`.
pub fn mi_x_t<T: Hash + Eq>(codes: &[T]) -> Result<f64, MiError> {
    plug_in_entropy(codes)
}

/// Class counts of an evaluation set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDistribution {
    pub counts: Vec<usize>,
}

impl LabelDistribution {
    pub fn from_labels(labels: &[u8], class_count: usize) -> Self {
        let mut counts = vec![0; class_count];
        for &l in labels {
            counts[l as usize] += 1;
        }
        Self { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn entropy_bits(&self) -> f64 {
        entropy_from_counts(&self.counts)
    }
}

/// `I(T;Y) = H(T) − Σ_y p(y) H(T | Y = y)`, clamped at zero.
pub fn mi_t_y<T: Hash + Eq + Copy>(codes: &[T], labels: &[u8], dist: &LabelDistribution) -> Result<f64, MiError> {
    if codes.len() != labels.len() {
        return Err(MiError::LengthMismatch {
            codes: codes.len(),
            labels: labels.len(),
        });
    }
    if dist.total() != labels.len() {
        return Err(MiError::LengthMismatch {
            codes: dist.total(),
            labels: labels.len(),
        });
    }
    if codes.is_empty() {
        return Err(MiError::Empty);
    }
    if let Some(&bad) = labels.iter().find(|&&l| l as usize >= dist.counts.len()) {
        return Err(MiError::LabelOutOfRange(bad));
    }
    let counts = sorted_counts(codes.iter().copied());
    if counts.len() == codes.len() {
        // T identifies every sample, so H(T|Y=y) = log2 N_y and I(T;Y) = H(Y).
        return Ok(dist.entropy_bits());
    }
    let h_t = entropy_from_counts(&counts);
    let mut by_class: Vec<Vec<T>> = dist.counts.iter().map(|&c| Vec::with_capacity(c)).collect();
    for (&code, &label) in codes.iter().zip(labels) {
        by_class
            .get_mut(label as usize)
            .ok_or(MiError::LabelOutOfRange(label))?
            .push(code);
    }
    let n = labels.len() as f64;
    let conditional: f64 = by_class
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| c.len() as f64 * entropy_from_counts(&sorted_counts(c.iter().copied())))
        .sum::<f64>()
        / n;
    Ok((h_t - conditional).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_codes_have_zero_entropy() {
        assert_eq!(plug_in_entropy(&[7u32; 1000]).unwrap(), 0.0);
    }

    #[test]
    fn ten_thousand_distinct_codes() {
        let codes: Vec<u32> = (0..10_000).collect();
        let h = plug_in_entropy(&codes).unwrap();
        assert_eq!(h, 10_000f64.log2());
        assert!((h - 13.2877).abs() < 1e-4);
    }

    #[test]
    fn two_pairs_is_one_bit() {
        assert_eq!(plug_in_entropy(&['a', 'a', 'b', 'b']).unwrap(), 1.0);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(plug_in_entropy::<u8>(&[]), Err(MiError::Empty)));
    }

    #[test]
    fn mi_x_t_is_entropy() {
        let codes = [1, 2, 2, 3, 3, 3];
        assert_eq!(mi_x_t(&codes).unwrap(), plug_in_entropy(&codes).unwrap());
        let distinct: Vec<u32> = (0..64).collect();
        assert_eq!(mi_x_t(&distinct).unwrap(), 6.0);
    }

    #[test]
    fn distinct_codes_over_balanced_classes() {
        let labels: Vec<u8> = (0..1000).map(|i| (i % 10) as u8).collect();
        let codes: Vec<u32> = (0..1000).collect();
        let dist = LabelDistribution::from_labels(&labels, 10);
        let mi = mi_t_y(&codes, &labels, &dist).unwrap();
        assert_eq!(mi, dist.entropy_bits());
        assert!((mi - 10f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn constant_codes_carry_no_label_information() {
        let labels = [0u8, 1, 2, 3, 1, 1];
        let dist = LabelDistribution::from_labels(&labels, 10);
        assert_eq!(mi_t_y(&[5u8; 6], &labels, &dist).unwrap(), 0.0);
    }

    #[test]
    fn codes_equal_to_labels_recover_label_entropy() {
        let labels = [0u8, 0, 0, 1, 2, 2, 9, 9];
        let dist = LabelDistribution::from_labels(&labels, 10);
        let codes: Vec<u8> = labels.to_vec();
        let mi = mi_t_y(&codes, &labels, &dist).unwrap();
        // H(Y) by hand: counts 3,1,2,2 of 8
        let by_hand = -[3.0f64, 1.0, 2.0, 2.0]
            .iter()
            .map(|c| c / 8.0 * (c / 8.0).log2())
            .sum::<f64>();
        assert!((mi - by_hand).abs() < 1e-12);
        assert_eq!(mi, dist.entropy_bits());
    }

    #[test]
    fn length_mismatch() {
        let dist = LabelDistribution::from_labels(&[0, 1], 10);
        assert!(matches!(
            mi_t_y(&[1u8, 2, 3], &[0, 1], &dist),
            Err(MiError::LengthMismatch { .. })
        ));
    }
}
