//! Command-line front end: `fetch`, `run`, `sweep`, `report`, `verify`.
//!
//! Exit codes: 0 success, 1 verification or runtime failure, 2 usage or
//! configuration error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::source::{bundled_sample_dir, is_known, KNOWN, MNIST_SAMPLE};
use crate::data::{default_cache_dir, fetch_known, load_dataset, Split};
use crate::experiment::{
    load_run, persist_run, prepare_data, run_on, sweep, ConfigError, ExperimentConfig, ExperimentError, Profile,
    RunOptions, RunResult, FAMILIES,
};
use crate::mi::input_entropy;
use crate::report::{emit_csv, emit_infoplane_svg, emit_mi_epoch_svg, emit_sweep_svg, verify_result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "infoplane", version, about = "Information-plane experiments on small CNNs")]
pub struct Cli {
    /// Dataset cache directory (defaults to $INFOPLANE_CACHE or ~/.cache/infoplane).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Download and verify a dataset into the cache.
    Fetch { dataset: String },
    /// Train one configuration and write its result file.
    Run(RunArgs),
    /// Run every variant of a sweep family and draw its figures.
    Sweep(SweepArgs),
    /// Write CSV and SVG figures for stored results.
    Report(ReportArgs),
    /// Re-check a result file's structure, bounds and diagnostics.
    Verify { result: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProfileArg {
    Desk,
    Paper,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Desk => Profile::Desk,
            ProfileArg::Paper => Profile::Paper,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Overrides {
    /// Apply a preset for sample counts, batch size and epochs.
    #[arg(long, value_enum)]
    pub profile: Option<ProfileArg>,
    /// Seed for subsampling, initialization and batch order.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Number of measurement epochs when --epochs or --profile is given.
    #[arg(long, default_value_t = crate::experiment::config::MEASUREMENT_POINTS)]
    pub points: usize,
    #[arg(long)]
    pub train_size: Option<usize>,
    #[arg(long)]
    pub test_size: Option<usize>,
    #[arg(long)]
    pub dataset: Option<String>,
    /// Store wall-clock time in results (they then differ between runs).
    #[arg(long)]
    pub record_timing: bool,
    /// Count fingerprint collisions by keeping exact bin vectors.
    #[arg(long)]
    pub audit: bool,
}

impl Overrides {
    fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(name) = &self.dataset {
            config.dataset.name = name.clone();
        }
        if let Some(p) = self.profile {
            Profile::from(p).apply(config);
        }
        if let Some(seed) = self.seed {
            config.run_seed = seed;
            config.dataset.seed = seed;
        }
        if let Some(n) = self.train_size {
            config.dataset.train_size = n;
            config.optimizer.batch_size = config.optimizer.batch_size.min(n);
        }
        if let Some(n) = self.test_size {
            config.dataset.test_size = n;
        }
        if let Some(e) = self.epochs {
            config.set_epochs(e, self.points);
        } else if self.profile.is_some() {
            let total = config.schedule.total_epochs;
            config.set_epochs(total, self.points);
        }
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            audit_fingerprints: self.audit,
            record_timing: self.record_timing,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub family: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Variants trained concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Result files to include.
    #[arg(required = true)]
    pub results: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: msg.into(),
    }
}

fn failure(msg: impl ToString) -> Failure {
    Failure {
        code: EXIT_FAILURE,
        msg: msg.to_string(),
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(c) => usage(c.to_string()),
            other => failure(other),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        usage(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cache = cli.cache.clone().unwrap_or_else(default_cache_dir);
    let outcome = match cli.command {
        Command::Fetch { dataset } => cmd_fetch(&dataset, &cache),
        Command::Run(args) => cmd_run(&args, &cache),
        Command::Sweep(args) => cmd_sweep(&args, &cache),
        Command::Report(args) => cmd_report(&args),
        Command::Verify { result } => cmd_verify(&result),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    run_with_args(std::env::args_os())
}

fn cmd_fetch(dataset: &str, cache: &Path) -> Result<i32, Failure> {
    if !is_known(dataset) {
        return Err(usage(format!("unknown dataset `{dataset}`; valid names: {}", KNOWN.join(", "))));
    }
    if dataset == MNIST_SAMPLE {
        for split in Split::BOTH {
            let d = load_dataset(dataset, split, cache).map_err(failure)?;
            let (h, distinct) = input_entropy(&d.images);
            println!("{dataset} {split}: {} images (bundled, {distinct} distinct, H(X) = {h:.4} bits)", d.len());
        }
        println!("bundled at {}", bundled_sample_dir().display());
        return Ok(EXIT_OK);
    }
    for f in fetch_known(dataset, cache).map_err(failure)? {
        let state = if f.cache_hit { "cache hit" } else { "downloaded" };
        println!("{}: {state}, verified", f.path.display());
    }
    for split in Split::BOTH {
        let d = load_dataset(dataset, split, cache).map_err(failure)?;
        println!("{dataset} {split}: {} images", d.len());
    }
    Ok(EXIT_OK)
}

fn print_progress(p: crate::experiment::Progress<'_>) {
    let m = p.metrics;
    let last = |s: Split| p.records.iter().filter(|r| r.split == s).max_by_key(|r| r.layer);
    let (tr, te) = (last(Split::Train), last(Split::Test));
    println!(
        "epoch {:>5}  loss {:.5}/{:.5}  acc {:.4}/{:.4}  output I(X;T) {:.4}/{:.4}  I(Y;T) {:.4}/{:.4}",
        m.epoch,
        m.train_loss,
        m.test_loss,
        m.train_acc,
        m.test_acc,
        tr.map_or(f64::NAN, |r| r.i_xt_bits),
        te.map_or(f64::NAN, |r| r.i_xt_bits),
        tr.map_or(f64::NAN, |r| r.i_ty_bits),
        te.map_or(f64::NAN, |r| r.i_ty_bits),
    );
}

fn train(config: &ExperimentConfig, cache: &Path, options: RunOptions, verbose: bool) -> Result<RunResult, Failure> {
    config.validate()?;
    let data = prepare_data(config, cache)?;
    let result = if verbose {
        run_on(config, &data, options, print_progress)?
    } else {
        run_on(config, &data, options, |_| {})?
    };
    Ok(result)
}

fn cmd_run(args: &RunArgs, cache: &Path) -> Result<i32, Failure> {
    let mut config = ExperimentConfig::load(&args.config)?;
    args.overrides.apply(&mut config);
    println!("train/test loss, accuracy and output-layer MI are shown as train/test");
    let result = train(&config, cache, args.overrides.options(), true)?;
    for w in &result.dpi_warnings {
        println!("warning: DPI: {w}");
    }
    persist_run(&result, &args.out).map_err(failure)?;
    println!("wrote {}", args.out.display());
    Ok(EXIT_OK)
}

fn cmd_sweep(args: &SweepArgs, cache: &Path) -> Result<i32, Failure> {
    let spec = sweep(&args.family)
        .ok_or_else(|| usage(format!("unknown sweep family `{}`; valid names: {}", args.family, FAMILIES.join(", "))))?;
    let configs: Vec<ExperimentConfig> = spec
        .variants
        .iter()
        .map(|v| {
            let mut c = v.clone();
            args.overrides.apply(&mut c);
            c.validate().map(|_| c)
        })
        .collect::<Result<_, _>>()?;
    std::fs::create_dir_all(&args.out).map_err(|e| failure(format!("{}: {e}", args.out.display())))?;

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RunResult, Failure>>>> =
        Mutex::new((0..configs.len()).map(|_| None).collect());
    let options = args.overrides.options();
    std::thread::scope(|s| {
        for _ in 0..args.jobs.clamp(1, configs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(config) = configs.get(i) else { break };
                let name = config.variant.clone().unwrap_or_default();
                println!("[{}] training {name}", spec.family);
                let outcome = train(config, cache, options, false);
                if let Ok(r) = &outcome {
                    if let Some(m) = r.metrics.last() {
                        println!("[{}] {name} done: train acc {:.4}, test acc {:.4}", spec.family, m.train_acc, m.test_acc);
                    }
                }
                slots.lock().unwrap()[i] = Some(outcome);
            });
        }
    });

    let mut results = Vec::new();
    for slot in slots.into_inner().unwrap() {
        results.push(slot.expect("every variant ran")?);
    }
    for r in &results {
        let variant = r.config.variant.clone().unwrap_or_else(|| "run".into());
        let path = args.out.join(format!("{variant}.json"));
        persist_run(r, &path).map_err(failure)?;
        for split in Split::BOTH {
            emit_infoplane_svg(r, split, &args.out.join(format!("{variant}-infoplane-{split}.svg"))).map_err(failure)?;
        }
        println!("wrote {}", path.display());
    }
    emit_csv(&results, &args.out.join(format!("{}.csv", spec.family))).map_err(failure)?;
    for split in Split::BOTH {
        emit_sweep_svg(&results, split, &args.out.join(format!("{}-{split}.svg", spec.family))).map_err(failure)?;
    }
    println!("wrote {}.csv and figures to {}", spec.family, args.out.display());
    Ok(EXIT_OK)
}

fn cmd_report(args: &ReportArgs) -> Result<i32, Failure> {
    let results: Vec<RunResult> = args
        .results
        .iter()
        .map(|p| load_run(p).map_err(failure))
        .collect::<Result<_, _>>()?;
    std::fs::create_dir_all(&args.out).map_err(|e| failure(format!("{}: {e}", args.out.display())))?;
    emit_csv(&results, &args.out.join("records.csv")).map_err(failure)?;
    for (path, r) in args.results.iter().zip(&results) {
        let stem = path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
        for split in Split::BOTH {
            emit_mi_epoch_svg(r, split, &args.out.join(format!("{stem}-mi-{split}.svg"))).map_err(failure)?;
            emit_infoplane_svg(r, split, &args.out.join(format!("{stem}-infoplane-{split}.svg"))).map_err(failure)?;
        }
    }
    println!("wrote records.csv and {} figures to {}", results.len() * 4, args.out.display());
    Ok(EXIT_OK)
}

fn cmd_verify(path: &Path) -> Result<i32, Failure> {
    let result = load_run(path).map_err(failure)?;
    let rep = verify_result(&result);
    let status = |ok: bool| if ok { "ok" } else { "FAIL" };
    println!("{:<28} {}", "record structure", status(rep.structure.is_empty()));
    for s in &rep.structure {
        println!("    {s}");
    }
    println!("{:<28} {}", "MI bounds", status(rep.bounds.is_empty()));
    for b in &rep.bounds {
        println!("    {b}");
    }
    println!("{:<28} {} warning(s)", "DPI (diagnostic)", rep.dpi_warnings.len());
    for w in &rep.dpi_warnings {
        println!("    warning: {w}");
    }
    println!("compression (I(X;T), threshold 0.5 bits):");
    for (split, layer, v) in &rep.compression {
        println!("    {split:<5} layer {layer:>2} ({}): {v}", result.layers[*layer]);
    }
    let verdict = if rep.passed() { "PASS" } else { "FAIL" };
    println!("verdict: {verdict}");
    Ok(if rep.passed() { EXIT_OK } else { EXIT_FAILURE })
}
