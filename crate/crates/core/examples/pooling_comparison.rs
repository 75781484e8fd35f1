//! With and without a max-pool after the second conv layer: pooling is the
//! only place where distinct inputs can merge before the classifier.
//!
//!     cargo run --release --example pooling_comparison -- [epochs] [train_size]

use infoplane::data::source::{default_cache_dir, MNIST_SAMPLE};
use infoplane::data::Split;
use infoplane::experiment::{prepare_data, run_on, sweep, Profile, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let epochs: usize = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(10);
    let samples: usize = std::env::args().nth(2).map(|a| a.parse()).transpose()?.unwrap_or(500);
    for mut config in sweep("pooling").expect("pooling family").variants {
        Profile::Desk.apply(&mut config);
        config.dataset.name = MNIST_SAMPLE.into();
        config.dataset.train_size = samples;
        config.dataset.test_size = samples;
        config.set_epochs(epochs, 5.min(epochs));
        let data = prepare_data(&config, &default_cache_dir())?;
        let result = run_on(&config, &data, RunOptions::default(), |_| {})?;

        println!("{} (pooling {:?})", config.variant.as_deref().unwrap_or("?"), config.architecture.pooling);
        let last_epoch = *config.schedule.measurement_epochs.last().unwrap();
        for r in result.records_for(Split::Train).filter(|r| r.epoch == last_epoch) {
            println!(
                "  T{} {:<10} distinct {:>5}/{}  I(X;T) {:.3}  I(Y;T) {:.3}",
                r.layer,
                result.layers[r.layer], r.distinct_codes, r.samples, r.i_xt_bits, r.i_ty_bits
            );
        }
    }
    Ok(())
}
