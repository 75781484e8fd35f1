//! Training loop with scheduled information measurements.

use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::config::{build_network, ConfigError, ExperimentConfig};
use super::result::{EpochMetrics, RunResult, SplitReference, Timing, RESULT_SCHEMA_VERSION};
use crate::data::{load_dataset, DataError, Dataset, Split, SubsampleSpec};
use crate::mi::{
    dpi_diagnostic, input_entropy, EpochMIRecord, LabelDistribution, MeasureContext, MiError, SplitMeasurement,
};
use crate::nn::{backward, cross_entropy_loss, forward, forward_with_trace, init_params, AdamConfig, AdamState, LossError, NetworkSpec, Params};
use crate::tensor::ShapeError;

/// Tolerance for DPI warnings stored in results.
pub const DPI_TOLERANCE: f64 = 1e-6;

/// Samples per forward pass during evaluation.
const EVAL_CHUNK: usize = 250;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error(transparent)]
    Mi(#[from] MiError),
    #[error("training diverged at epoch {epoch}, batch {batch}: loss is {loss}")]
    Diverged { epoch: usize, batch: usize, loss: f64 },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Keep exact bin vectors to count fingerprint collisions (memory heavy).
    pub audit_fingerprints: bool,
    /// Store wall-clock time in the result, which makes files differ between runs.
    pub record_timing: bool,
}

/// Train/test subsets drawn as the config prescribes.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train: Dataset,
    pub test: Dataset,
}

pub fn prepare_data(config: &ExperimentConfig, cache_dir: &Path) -> Result<PreparedData, ExperimentError> {
    let d = &config.dataset;
    let draw = |split: Split, count: usize, seed: u64| -> Result<Dataset, DataError> {
        load_dataset(&d.name, split, cache_dir)?.subsample(SubsampleSpec { count, seed })
    };
    Ok(PreparedData {
        train: draw(Split::Train, d.train_size, d.seed)?,
        test: draw(Split::Test, d.test_size, d.seed.wrapping_add(1))?,
    })
}

/// What gets reported after each measurement epoch.
#[derive(Debug, Clone)]
pub struct Progress<'a> {
    pub metrics: &'a EpochMetrics,
    pub records: &'a [EpochMIRecord],
}

pub fn run_experiment(config: &ExperimentConfig, cache_dir: &Path) -> Result<RunResult, ExperimentError> {
    let data = prepare_data(config, cache_dir)?;
    run_on(config, &data, RunOptions::default(), |_| {})
}

pub fn run_on(
    config: &ExperimentConfig,
    data: &PreparedData,
    options: RunOptions,
    mut progress: impl FnMut(Progress<'_>),
) -> Result<RunResult, ExperimentError> {
    config.validate()?;
    let started = Instant::now();
    let net = build_network(config)?;
    let mut params = init_params(&net, config.run_seed).map_err(ConfigError::from)?;
    let mut adam = AdamState::new(
        AdamConfig {
            learning_rate: config.optimizer.learning_rate,
            ..AdamConfig::default()
        },
        params.tensors(),
    );
    let layers: Vec<String> = net.recorded_layers().iter().map(|&i| net.layers[i].name()).collect();
    let references = vec![reference(&data.train), reference(&data.test)];
    let batch = config.optimizer.batch_size;
    let n = data.train.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut measure_at = config.schedule.measurement_epochs.iter().peekable();

    let mut epoch_losses = Vec::with_capacity(config.schedule.total_epochs);
    let mut metrics = Vec::new();
    let mut records = Vec::new();
    let mut collisions = 0;
    for epoch in 1..=config.schedule.total_epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(config.run_seed);
        rng.set_stream(epoch as u64);
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0;
        for (b, idx) in order.chunks(batch).enumerate() {
            let x = data.train.images.gather_rows(idx);
            let y: Vec<u8> = idx.iter().map(|&i| data.train.labels[i]).collect();
            let cache = forward(&net, &params, &x)?;
            let (loss, grad) = cross_entropy_loss(cache.probs(), &y)?;
            if !loss.is_finite() {
                return Err(ExperimentError::Diverged { epoch, batch: b, loss });
            }
            let grads = backward(&net, &params, &cache, grad)?;
            adam.step(params.slices_mut(), grads.tensors().map(|t| t.data()));
            loss_sum += loss;
            batches += 1;
        }
        epoch_losses.push(loss_sum / batches as f64);

        if measure_at.peek() == Some(&&epoch) {
            measure_at.next();
            let (train_loss, train_acc, mut train_recs, c1) =
                evaluate(&net, &params, &data.train, config, epoch, Split::Train, options)?;
            let (test_loss, test_acc, test_recs, c2) =
                evaluate(&net, &params, &data.test, config, epoch, Split::Test, options)?;
            collisions += c1 + c2;
            let m = EpochMetrics {
                epoch,
                train_loss,
                train_acc,
                test_loss,
                test_acc,
            };
            train_recs.extend(test_recs);
            progress(Progress {
                metrics: &m,
                records: &train_recs,
            });
            metrics.push(m);
            records.extend(train_recs);
        }
    }
    let dpi_warnings = dpi_diagnostic(&records, DPI_TOLERANCE);
    Ok(RunResult {
        schema_version: RESULT_SCHEMA_VERSION,
        config: config.clone(),
        layers,
        epoch_losses,
        metrics,
        references,
        records,
        dpi_warnings,
        fingerprint_collisions: options.audit_fingerprints.then_some(collisions),
        timing: options.record_timing.then(|| Timing {
            wall_seconds: started.elapsed().as_secs_f64(),
        }),
    })
}

fn reference(d: &Dataset) -> SplitReference {
    let (h_x_bits, distinct_inputs) = input_entropy(&d.images);
    let dist = LabelDistribution::from_labels(&d.labels, d.class_count);
    SplitReference {
        split: d.split,
        samples: d.len(),
        distinct_inputs,
        h_x_bits,
        h_y_bits: dist.entropy_bits(),
        label_counts: dist.counts,
    }
}

type Evaluation = (f64, f64, Vec<EpochMIRecord>, usize);

/// Streams the split through the network in fixed order, returning mean loss,
/// accuracy, per-layer records and fingerprint collisions.
fn evaluate(
    net: &NetworkSpec,
    params: &Params,
    d: &Dataset,
    config: &ExperimentConfig,
    epoch: usize,
    split: Split,
    options: RunOptions,
) -> Result<Evaluation, ExperimentError> {
    let ctx = MeasureContext { epoch, split };
    let mut m = SplitMeasurement::new(ctx, net.recorded_layers().len(), config.estimator);
    if options.audit_fingerprints {
        m = m.with_audit();
    }
    let n = d.len();
    let (mut loss_sum, mut correct) = (0.0, 0usize);
    let mut start = 0;
    while start < n {
        let end = (start + EVAL_CHUNK).min(n);
        let x = d.images.slice_rows(start, end);
        let y = &d.labels[start..end];
        let (trace, probs) = forward_with_trace(net, params, &x)?;
        m.observe(&trace)?;
        let (loss, _) = cross_entropy_loss(&probs, y)?;
        loss_sum += loss * (end - start) as f64;
        correct += (0..end - start).filter(|&i| argmax(probs.row(i)) == y[i] as usize).count();
        start = end;
    }
    let records = m.finish(&d.labels, d.class_count)?;
    Ok((loss_sum / n as f64, correct as f64 / n as f64, records, m.collisions()))
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}
