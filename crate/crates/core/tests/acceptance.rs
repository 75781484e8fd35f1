//! One line per acceptance criterion. Run with
//! `cargo test --release --test acceptance`; exits non-zero if any fails.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use common::mi_oracle::{self, random_fixture};
use infoplane::data::source::{default_cache_dir, fetch_known, load_dataset, MNIST, MNIST_SAMPLE};
use infoplane::data::{
    encode_idx_images, encode_idx_labels, parse_cifar10, parse_idx_images, parse_idx_labels, Split,
};
use infoplane::experiment::{
    base_config, prepare_data, run_on, sweep, ExperimentConfig, Profile, RunOptions, RunResult, DPI_TOLERANCE,
};
use infoplane::mi::{
    bin_activations, dpi_diagnostic, fingerprint, input_entropy, mi_t_y, mi_x_t, LabelDistribution, DEFAULT_BIN_SIZE,
};
use infoplane::report::{compression_diagnostic, first_epoch_reaching, mi_curves, COMPRESSION_THRESHOLD};
use infoplane::Tensor;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Official MNIST when the cache holds it, else the bundled digits.
fn mnist_source(cache: &Path) -> &'static str {
    if fetch_known(MNIST, cache).is_ok() {
        MNIST
    } else {
        MNIST_SAMPLE
    }
}

fn desk_config(dataset: &str, widths: &[usize]) -> ExperimentConfig {
    let mut c = base_config(dataset, widths, &vec![3; widths.len()], &[10]);
    Profile::Desk.apply(&mut c);
    c
}

fn saturation_run(cache: &Path) -> Result<(RunResult, f64), String> {
    let config = desk_config(mnist_source(cache), &[6, 6, 6]);
    let started = Instant::now();
    let data = prepare_data(&config, cache).map_err(|e| e.to_string())?;
    let options = RunOptions {
        audit_fingerprints: true,
        record_timing: false,
    };
    let result = run_on(&config, &data, options, |_| {}).map_err(|e| e.to_string())?;
    Ok((result, started.elapsed().as_secs_f64()))
}

fn c1_saturation(result: &RunResult, seconds: f64) -> Outcome {
    let last = result.final_layer();
    let mut worst_ty: f64 = 0.0;
    let mut problems = Vec::new();
    for split in Split::BOTH {
        let reference = result.reference(split).ok_or("missing split reference")?;
        let bound = (reference.samples as f64).log2();
        for r in result.records_for(split).filter(|r| r.layer < last) {
            if r.distinct_codes != r.samples || r.i_xt_bits != bound {
                problems.push(format!("{} layer {} epoch {}", split.as_str(), r.layer, r.epoch));
            }
            worst_ty = worst_ty.max((r.i_ty_bits - reference.h_y_bits).abs());
        }
    }
    let collisions = result.fingerprint_collisions.unwrap_or(usize::MAX);
    check(
        problems.is_empty() && worst_ty <= 0.05 && collisions == 0 && seconds < 600.0,
        format!(
            "{} on {}: I(X;T) = log2 {} at every conv record, max |I(Y;T) - H(Y)| = {worst_ty:.2e}, \
             collisions {collisions}, {seconds:.0}s, unsaturated {:?}",
            result.config.dataset.name,
            result.run_id(),
            result.config.dataset.train_size,
            problems.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn c2_input_entropy(cache: &Path) -> Outcome {
    if mnist_source(cache) != MNIST {
        return Err(format!("official MNIST is not in {} (run `infoplane fetch mnist`)", cache.display()));
    }
    let mut config = desk_config(MNIST, &[6, 6, 6]);
    Profile::Paper.apply(&mut config);
    let data = prepare_data(&config, cache).map_err(|e| e.to_string())?;
    let target = 10_000f64.log2();
    let mut parts = Vec::new();
    let mut ok = true;
    for (split, d) in [("train", &data.train), ("test", &data.test)] {
        let (h, distinct) = input_entropy(&d.images);
        ok &= distinct == 10_000 && (h - target).abs() < 1e-9;
        parts.push(format!("{split} H(X) = {h:.6} ({distinct} distinct)"));
    }
    check(ok, format!("{}, target {target:.6}", parts.join(", ")))
}

fn c3_output_growth(result: &RunResult) -> Outcome {
    let out = mi_curves(result, Split::Train).pop().ok_or("no layers")?;
    let first = out.points.first().ok_or("no points")?;
    let last = out.points.last().ok_or("no points")?;
    let acc = result.metrics.last().ok_or("no metrics")?.train_acc;
    let gain = last.2 - first.2;
    check(
        gain >= 1.0 && acc >= 0.95,
        format!(
            "output I(Y;T) epoch {} {:.3} -> epoch {} {:.3} (gain {gain:.3}), train acc {acc:.3}",
            first.0, first.2, last.0, last.2
        ),
    )
}

fn c4_width_ordering(cache: &Path, epochs: usize, points: usize) -> Outcome {
    let family = sweep("width").ok_or("no width family")?;
    let mut reach = Vec::new();
    for width in [1, 12] {
        let mut config = family
            .variants
            .iter()
            .find(|v| v.architecture.conv_widths[0] == width)
            .ok_or("width variant missing")?
            .clone();
        Profile::Desk.apply(&mut config);
        config.dataset.name = mnist_source(cache).to_string();
        config.set_epochs(epochs, points);
        let data = prepare_data(&config, cache).map_err(|e| e.to_string())?;
        let result = run_on(&config, &data, RunOptions::default(), |_| {}).map_err(|e| e.to_string())?;
        let out = mi_curves(&result, Split::Train).pop().ok_or("no layers")?;
        let epoch = first_epoch_reaching(&out, 0.9).ok_or("empty curve")?;
        reach.push((width, epoch, out.points.last().unwrap().2));
    }
    let (narrow, wide) = (reach[0], reach[1]);
    check(
        wide.1 <= narrow.1,
        format!(
            "90% of final I(Y;T): width 12 at epoch {} (final {:.3}), width 1 at epoch {} (final {:.3}); \
             {epochs} epochs, {points} points",
            wide.1, wide.2, narrow.1, narrow.2
        ),
    )
}

fn c5_no_compression(result: &RunResult) -> Outcome {
    let out = mi_curves(result, Split::Train).pop().ok_or("no layers")?;
    let verdict = compression_diagnostic(&out, COMPRESSION_THRESHOLD).map_err(|e| e.to_string())?;
    check(!verdict.compression, format!("output layer, train split: {verdict}"))
}

fn c6_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..200 {
        let f = random_fixture(seed);
        let codes: Vec<_> = f
            .activations
            .iter()
            .map(|h| fingerprint(&bin_activations(h, DEFAULT_BIN_SIZE).unwrap()))
            .collect();
        let bins: Vec<Vec<i64>> = f.activations.iter().map(|h| mi_oracle::bins(h, DEFAULT_BIN_SIZE)).collect();
        let dist = LabelDistribution::from_labels(&f.labels, f.classes);
        let xt = mi_x_t(&codes).map_err(|e| e.to_string())?;
        let ty = mi_t_y(&codes, &f.labels, &dist).map_err(|e| e.to_string())?;
        worst = worst
            .max((xt - mi_oracle::entropy(&bins)).abs())
            .max((ty - mi_oracle::mutual_information(&bins, &f.labels)).abs());
    }
    check(worst <= 1e-9, format!("200 fixtures, max deviation {worst:.2e} bits"))
}

fn c7_gradients() -> Outcome {
    let results = common::gradcheck::run_all(50);
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let listed: Vec<String> = results.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect();
    check(worst < 1e-4, format!("50 instances each: {}", listed.join(", ")))
}

fn c8_determinism(cache: &Path) -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut config = desk_config(MNIST_SAMPLE, &[3, 3]);
    config.dataset.train_size = 200;
    config.dataset.test_size = 200;
    config.set_epochs(5, 5);
    let cfg = tmp.path().join("config.json");
    std::fs::write(&cfg, config.to_json()).map_err(|e| e.to_string())?;
    let mut outputs: Vec<PathBuf> = Vec::new();
    for name in ["first.json", "second.json"] {
        let out = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_infoplane"))
            .args(["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .env("INFOPLANE_CACHE", cache)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        outputs.push(out);
    }
    let a = std::fs::read(&outputs[0]).map_err(|e| e.to_string())?;
    let b = std::fs::read(&outputs[1]).map_err(|e| e.to_string())?;
    check(a == b, format!("two `run` invocations, {} and {} bytes, identical: {}", a.len(), b.len(), a == b))
}

fn c9_dpi(result: &RunResult) -> Outcome {
    let last = result.final_layer();
    let violations = dpi_diagnostic(&result.records, DPI_TOLERANCE);
    let (conv, output): (Vec<_>, Vec<_>) = violations.iter().partition(|v| v.to_layer < last);
    for v in &output {
        eprintln!("warning: {v}");
    }
    check(
        conv.is_empty() && result.dpi_warnings.len() == violations.len(),
        format!(
            "{} conv-layer violations, {} output-layer warnings (stored in result: {})",
            conv.len(),
            output.len(),
            result.dpi_warnings.len()
        ),
    )
}

fn cifar_record(label: u8, grey: &[u8]) -> Vec<u8> {
    let mut rec = vec![label];
    for _ in 0..3 {
        rec.extend_from_slice(grey);
    }
    rec
}

fn c10_parsers(cache: &Path) -> Outcome {
    let pixels: Vec<f64> = (0..3 * 5 * 4).map(|i| f64::from((i * 37 % 256) as u8) / 255.0).collect();
    let images = Tensor::new(vec![3, 5, 4, 1], pixels).unwrap();
    let labels = vec![0u8, 9, 4];
    let img_bytes = encode_idx_images(&images);
    let lbl_bytes = encode_idx_labels(&labels);
    let idx_ok = parse_idx_images(&img_bytes).map_err(|e| e.to_string())? == images
        && parse_idx_labels(&lbl_bytes, 10).map_err(|e| e.to_string())? == labels
        && encode_idx_images(&parse_idx_images(&img_bytes).unwrap()) == img_bytes;

    let greys: Vec<Vec<u8>> = (0..4u32).map(|k| (0..1024u32).map(|i| ((i * 7 + k * 61) % 256) as u8).collect()).collect();
    let bytes: Vec<u8> = greys.iter().enumerate().flat_map(|(k, g)| cifar_record(k as u8 * 3, g)).collect();
    let parsed = parse_cifar10(&bytes, Split::Test).map_err(|e| e.to_string())?;
    let rebuilt: Vec<u8> = (0..parsed.len())
        .flat_map(|k| {
            let grey: Vec<u8> = parsed.images.row(k).iter().map(|v| (v * 255.0).round() as u8).collect();
            cifar_record(parsed.labels[k], &grey)
        })
        .collect();
    let cifar_ok = rebuilt == bytes && parsed.labels == vec![0, 3, 6, 9];

    let official = if mnist_source(cache) == MNIST {
        let train = load_dataset(MNIST, Split::Train, cache).map_err(|e| e.to_string())?;
        let test = load_dataset(MNIST, Split::Test, cache).map_err(|e| e.to_string())?;
        let ok = train.len() == 60_000
            && test.len() == 10_000
            && train.labels.iter().chain(&test.labels).all(|&l| l <= 9);
        (ok, format!("official MNIST {}/{}", train.len(), test.len()))
    } else {
        (true, "official MNIST not cached, skipped".to_string())
    };
    check(
        idx_ok && cifar_ok && official.0,
        format!("IDX round-trip {idx_ok}, CIFAR-10 round-trip {cifar_ok}, {}", official.1),
    )
}

fn main() {
    let cache = default_cache_dir();
    let saturation = saturation_run(&cache);
    let from_run = |f: fn(&RunResult) -> Outcome| match &saturation {
        Ok((r, _)) => f(r),
        Err(e) => Err(format!("saturation run failed: {e}")),
    };
    let results: Vec<(usize, &str, Outcome)> = vec![
        (
            1,
            "entropy saturation",
            match &saturation {
                Ok((r, s)) => c1_saturation(r, *s),
                Err(e) => Err(e.clone()),
            },
        ),
        (2, "H(X) = log2 1e4 under the paper profile", c2_input_entropy(&cache)),
        (3, "output-layer I(Y;T) growth", from_run(c3_output_growth)),
        (4, "wide nets settle no later than narrow ones", c4_width_ordering(&cache, 40, 20)),
        (5, "no compression of the output layer", from_run(c5_no_compression)),
        (6, "estimator matches the brute-force oracle", c6_oracle()),
        (7, "gradients match finite differences", c7_gradients()),
        (8, "byte-identical reruns", c8_determinism(&cache)),
        (9, "no DPI violations among conv layers", from_run(c9_dpi)),
        (10, "IDX and CIFAR-10 parsers", c10_parsers(&cache)),
    ];
    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
