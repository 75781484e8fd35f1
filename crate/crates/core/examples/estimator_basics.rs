//! The binning estimator on hand-made activations: saturation, label
//! information, and how the bin width changes what a layer "remembers".
//!
//!     cargo run --example estimator_basics

use infoplane::mi::{bin_activations, fingerprint, mi_t_y, mi_x_t, BinnedCode, LabelDistribution, DEFAULT_BIN_SIZE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn codes(acts: &[Vec<f64>], bin: f64) -> Vec<BinnedCode> {
    acts.iter().map(|h| fingerprint(&bin_activations(h, bin).unwrap())).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 1000;
    let labels: Vec<u8> = (0..n).map(|i| (i % 10) as u8).collect();
    let dist = LabelDistribution::from_labels(&labels, 10);
    println!("N = {n}, log2 N = {:.4}, H(Y) = {:.4}", (n as f64).log2(), dist.entropy_bits());

    // A wide tanh layer: 64 units spread over (-1, 1).
    let wide: Vec<Vec<f64>> = (0..n).map(|_| (0..64).map(|_| rng.gen_range(-1.0f64..1.0)).collect()).collect();
    // A two-unit layer that only encodes the label.
    let label_only: Vec<Vec<f64>> = labels.iter().map(|&y| vec![f64::from(y) * 0.7, 0.0]).collect();
    // A single squashed unit: everything lands in one or two bins.
    let narrow: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-0.6f64..0.6).tanh()]).collect();

    for (name, acts) in [("64 random units", &wide), ("label code", &label_only), ("one unit", &narrow)] {
        for bin in [DEFAULT_BIN_SIZE, 0.1, 0.01] {
            let c = codes(acts, bin);
            println!(
                "{name:<16} bin {bin:<5}  I(X;T) {:>7.4}  I(Y;T) {:>7.4}",
                mi_x_t(&c)?,
                mi_t_y(&c, &labels, &dist)?
            );
        }
    }
    Ok(())
}
