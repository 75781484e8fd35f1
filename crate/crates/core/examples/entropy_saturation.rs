//! Trains a width-6, depth-3 net on 1000 bundled MNIST digits and shows that
//! every conv layer keeps all log2(N) bits about the input.
//!
//!     cargo run --release --example entropy_saturation -- [epochs]

use infoplane::data::source::{default_cache_dir, MNIST_SAMPLE};
use infoplane::data::Split;
use infoplane::experiment::{base_config, prepare_data, run_on, Profile, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let epochs: usize = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(150);
    let mut config = base_config(MNIST_SAMPLE, &[6, 6, 6], &[3, 3, 3], &[10]);
    Profile::Desk.apply(&mut config);
    config.set_epochs(epochs, std::env::args().nth(2).map(|a| a.parse().unwrap()).unwrap_or(12));

    let data = prepare_data(&config, &default_cache_dir())?;
    let result = run_on(&config, &data, RunOptions::default(), |p| {
        let out = p.records.iter().filter(|r| r.split == Split::Train).last().unwrap();
        println!(
            "epoch {:>4}  loss {:.4}  train acc {:.3}  output I(X;T) {:.3}  I(Y;T) {:.3}",
            p.metrics.epoch, p.metrics.train_loss, p.metrics.train_acc, out.i_xt_bits, out.i_ty_bits
        );
    })?;

    let train = result.reference(Split::Train).unwrap();
    println!("H(X) = {:.6} bits, H(Y) = {:.6} bits", train.h_x_bits, train.h_y_bits);
    for r in result.records_for(Split::Train).filter(|r| r.layer < result.final_layer()) {
        if r.distinct_codes != r.samples {
            println!("layer {} at epoch {} merged some inputs", r.layer, r.epoch);
        }
    }
    println!("conv layers checked at {} epochs", result.metrics.len());
    Ok(())
}
