use std::path::Path;
use std::process::{Command, Output};

use infoplane::data::source::MNIST_SAMPLE;
use infoplane::experiment::{base_config, ExperimentConfig};

fn infoplane(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infoplane"))
        .args(args)
        .env("INFOPLANE_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn tiny_config() -> ExperimentConfig {
    let mut c = base_config(MNIST_SAMPLE, &[2, 2], &[3, 3], &[10]);
    c.dataset.train_size = 60;
    c.dataset.test_size = 40;
    c.optimizer.batch_size = 20;
    c.set_epochs(3, 3);
    c
}

fn write_config(dir: &Path, c: &ExperimentConfig) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, c.to_json()).unwrap();
    p.display().to_string()
}

#[test]
fn fetch_rejects_unknown_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    let o = infoplane(tmp.path(), &["fetch", "imagenet"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("mnist-sample"));
}

#[test]
fn fetch_bundled_sample() {
    let tmp = tempfile::tempdir().unwrap();
    let o = infoplane(tmp.path(), &["fetch", "mnist-sample"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(text(&o).contains("5000 images"));
}

#[test]
fn fetch_reports_corrupted_cache() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("mnist");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("train-images-idx3-ubyte.gz"), b"not mnist").unwrap();
    let o = infoplane(tmp.path(), &["fetch", "mnist"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("mismatch"), "{}", text(&o));
}

#[test]
fn run_is_deterministic_and_verifies() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &tiny_config());
    let a = tmp.path().join("a.json");
    let b = tmp.path().join("b.json");
    for out in [&a, &b] {
        let o = infoplane(tmp.path(), &["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "7"]);
        assert_eq!(o.status.code(), Some(0), "{}", text(&o));
        assert!(text(&o).contains("epoch     3"));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let o = infoplane(tmp.path(), &["verify", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(text(&o).contains("verdict: PASS"));

    let mut v: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    v["records"][0]["i_xt_bits"] = serde_json::json!(60f64.log2() + 1.0);
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = infoplane(tmp.path(), &["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("outside"));

    let figs = tmp.path().join("figs");
    let o = infoplane(tmp.path(), &["report", a.to_str().unwrap(), "--out", figs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    for f in ["records.csv", "a-mi-train.svg", "a-mi-test.svg", "a-infoplane-train.svg"] {
        assert!(figs.join(f).exists(), "{f}");
    }
}

#[test]
fn schema_errors_name_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&tiny_config().to_json()).unwrap();
    v["estimator"]["bin_size"] = serde_json::json!(-1.0);
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, v.to_string()).unwrap();
    let out = tmp.path().join("r.json");
    let o = infoplane(tmp.path(), &["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("estimator.bin_size"), "{}", text(&o));
    assert!(!out.exists());
}

#[test]
fn sweep_rejects_unknown_family() {
    let tmp = tempfile::tempdir().unwrap();
    let o = infoplane(tmp.path(), &["sweep", "breadth", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("multi_fc"));
}

#[test]
fn pooling_sweep_writes_both_variants() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("pool");
    let o = infoplane(
        tmp.path(),
        &[
            "sweep", "pooling", "--out", out.to_str().unwrap(), "--profile", "desk", "--dataset", "mnist-sample",
            "--epochs", "2", "--points", "2", "--train-size", "40", "--test-size", "40", "--jobs", "2",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    for f in ["no-pool.json", "pool.json", "pooling.csv", "pooling-train.svg", "pooling-test.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn missing_subcommand_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(infoplane(tmp.path(), &[]).status.code(), Some(2));
    assert_eq!(infoplane(tmp.path(), &["run"]).status.code(), Some(2));
}
