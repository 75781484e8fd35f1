//! Narrow versus wide depth-6 nets: when does the output layer's I(Y;T)
//! settle?
//!
//!     cargo run --release --example width_sweep -- [epochs] [points] [dataset] [widths...]

use std::time::Instant;

use infoplane::data::source::{default_cache_dir, MNIST};
use infoplane::data::Split;
use infoplane::experiment::{prepare_data, run_on, sweep, Profile, RunOptions};
use infoplane::report::{first_epoch_reaching, mi_curves};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let epochs: usize = args.first().map(|a| a.parse()).transpose()?.unwrap_or(40);
    let points: usize = args.get(1).map(|a| a.parse()).transpose()?.unwrap_or(20);
    let dataset = args.get(2).cloned().unwrap_or_else(|| MNIST.to_string());
    let widths: Vec<usize> = if args.len() > 3 {
        args[3..].iter().map(|a| a.parse()).collect::<Result<_, _>>()?
    } else {
        vec![1, 12]
    };

    let family = sweep("width").expect("width family");
    for mut config in family.variants {
        if !widths.contains(&config.architecture.conv_widths[0]) {
            continue;
        }
        Profile::Desk.apply(&mut config);
        config.dataset.name = dataset.clone();
        config.set_epochs(epochs, points);

        let started = Instant::now();
        let data = prepare_data(&config, &default_cache_dir())?;
        let result = run_on(&config, &data, RunOptions::default(), |_| {})?;
        let out = mi_curves(&result, Split::Train).pop().unwrap();
        let final_ity = out.points.last().unwrap().2;
        println!(
            "{:<18} final I(Y;T) {:.3}  reaches 90% at epoch {:>4}  train acc {:.3}  ({:.0}s)",
            config.variant.as_deref().unwrap_or("?"),
            final_ity,
            first_epoch_reaching(&out, 0.9).unwrap(),
            result.metrics.last().unwrap().train_acc,
            started.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
