//! Trains a small net and writes its information-plane and MI-versus-epoch
//! figures plus a CSV of every record.
//!
//!     cargo run --release --example information_plane -- [out_dir] [epochs]

use std::path::PathBuf;

use infoplane::data::source::{default_cache_dir, MNIST_SAMPLE};
use infoplane::data::Split;
use infoplane::experiment::{base_config, prepare_data, run_on, Profile, RunOptions};
use infoplane::report::{
    compression_diagnostic, emit_csv, emit_infoplane_svg, emit_mi_epoch_svg, mi_curves, COMPRESSION_THRESHOLD,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "infoplane-out".into()));
    let epochs: usize = std::env::args().nth(2).map(|a| a.parse()).transpose()?.unwrap_or(30);
    std::fs::create_dir_all(&out)?;

    let mut config = base_config(MNIST_SAMPLE, &[6, 6], &[3, 3], &[10]);
    Profile::Desk.apply(&mut config);
    config.dataset.train_size = 500;
    config.dataset.test_size = 500;
    config.set_epochs(epochs, 15);
    let data = prepare_data(&config, &default_cache_dir())?;
    let result = run_on(&config, &data, RunOptions::default(), |p| {
        println!("epoch {:>3}  test acc {:.3}", p.metrics.epoch, p.metrics.test_acc);
    })?;

    for split in Split::BOTH {
        emit_infoplane_svg(&result, split, &out.join(format!("infoplane-{}.svg", split.as_str())))?;
        emit_mi_epoch_svg(&result, split, &out.join(format!("mi-{}.svg", split.as_str())))?;
    }
    emit_csv(std::slice::from_ref(&result), &out.join("records.csv"))?;

    for curve in mi_curves(&result, Split::Train) {
        let (_, xt, ty) = *curve.points.last().unwrap();
        let verdict = compression_diagnostic(&curve, COMPRESSION_THRESHOLD)?;
        println!("T{} {:<10} I(X;T) {xt:.3}  I(Y;T) {ty:.3}  {verdict}", curve.layer, result.layers[curve.layer]);
    }
    println!("figures written to {}", out.display());
    Ok(())
}
