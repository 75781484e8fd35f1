//! Brute-force information estimates from an explicit joint histogram over
//! exact bin vectors, sharing no code with the library estimator.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bins(h: &[f64], bin_size: f64) -> Vec<i64> {
    h.iter().map(|v| (v / bin_size).floor() as i64).collect()
}

fn h_of(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    -counts
        .map(|c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>()
}

/// H(T) over exact bin vectors.
pub fn entropy(symbols: &[Vec<i64>]) -> f64 {
    let mut hist: BTreeMap<&[i64], usize> = BTreeMap::new();
    for s in symbols {
        *hist.entry(s).or_default() += 1;
    }
    h_of(hist.into_values(), symbols.len() as f64)
}

/// I(T;Y) = Σ p(t,y) log2 p(t,y) / (p(t) p(y)).
pub fn mutual_information(symbols: &[Vec<i64>], labels: &[u8]) -> f64 {
    let n = symbols.len() as f64;
    let mut joint: BTreeMap<(&[i64], u8), usize> = BTreeMap::new();
    let mut pt: BTreeMap<&[i64], usize> = BTreeMap::new();
    let mut py: BTreeMap<u8, usize> = BTreeMap::new();
    for (s, &y) in symbols.iter().zip(labels) {
        *joint.entry((s, y)).or_default() += 1;
        *pt.entry(s).or_default() += 1;
        *py.entry(y).or_default() += 1;
    }
    joint
        .iter()
        .map(|(&(t, y), &c)| {
            let p = c as f64 / n;
            p * (p / ((pt[t] as f64 / n) * (py[&y] as f64 / n))).log2()
        })
        .sum::<f64>()
        .max(0.0)
}

pub fn label_entropy(labels: &[u8]) -> f64 {
    let mut hist: BTreeMap<u8, usize> = BTreeMap::new();
    for &y in labels {
        *hist.entry(y).or_default() += 1;
    }
    h_of(hist.into_values(), labels.len() as f64)
}

/// Random activations of `n ≤ 64` samples and `d ≤ 8` features with labels.
/// A coarse value grid makes repeated bin vectors common.
pub struct Fixture {
    pub n: usize,
    pub d: usize,
    pub activations: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub classes: usize,
}

pub fn random_fixture(seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=64);
    let d = rng.gen_range(1..=8);
    let classes = rng.gen_range(1..=10);
    let spread = [0.5, 1.0, 2.0, 4.0][rng.gen_range(0..4)];
    let activations = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-spread..spread)).collect())
        .collect();
    let labels = (0..n).map(|_| rng.gen_range(0..classes) as u8).collect();
    Fixture {
        n,
        d,
        activations,
        labels,
        classes,
    }
}
