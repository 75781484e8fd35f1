//! Loads the bundled MNIST digits (and the official files when cached) and
//! reports sizes, label counts and input entropy.
//!
//!     cargo run --release --example parse_datasets

use infoplane::data::source::{default_cache_dir, load_dataset, MNIST, MNIST_SAMPLE};
use infoplane::data::{parse_cifar10, Split};
use infoplane::mi::{input_entropy, LabelDistribution};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cache = default_cache_dir();
    for name in [MNIST_SAMPLE, MNIST] {
        for split in Split::BOTH {
            let d = match load_dataset(name, split, &cache) {
                Ok(d) => d,
                Err(e) => {
                    println!("{name} {}: {e}", split.as_str());
                    continue;
                }
            };
            let (h, distinct) = input_entropy(&d.images);
            let dist = LabelDistribution::from_labels(&d.labels, d.class_count);
            println!(
                "{name} {:<5} {:?}  distinct {distinct}  H(X) {h:.4}  H(Y) {:.4}  labels {:?}",
                split.as_str(),
                d.images.shape(),
                dist.entropy_bits(),
                dist.counts
            );
        }
    }

    // Two CIFAR-10 records built by hand: one black "cat", one grey "ship".
    let mut bytes = vec![3u8];
    bytes.extend(std::iter::repeat(0u8).take(3 * 1024));
    bytes.push(8);
    bytes.extend(std::iter::repeat(51u8).take(3 * 1024));
    let cifar = parse_cifar10(&bytes, Split::Test)?;
    println!(
        "cifar10 fixture {:?} labels {:?} first pixels {:.1} {:.1}",
        cifar.images.shape(),
        cifar.labels,
        cifar.images.row(0)[0],
        cifar.images.row(1)[0]
    );
    Ok(())
}
