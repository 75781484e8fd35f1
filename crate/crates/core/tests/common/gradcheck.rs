//! Central finite-difference oracle for layer gradients.
//!
//! Every check reduces a layer output to a scalar `L = Σ r ⊙ out` with a
//! random projection `r`, so the analytic gradient of `L` is the layer's
//! backward pass fed with `grad_out = r`.

#![allow(dead_code)]

use infoplane::nn::{self, Activation, LayerSpec, NetworkSpec};
use infoplane::Tensor;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STEP: f64 = 1e-5;
pub const MAX_REL_ERROR: f64 = 1e-4;

pub fn central_diff(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + STEP;
            let up = f(&probe);
            probe[i] = orig - STEP;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * STEP)
        })
        .collect()
}

pub fn max_rel_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / (a.abs() + n.abs()).max(1e-8))
        .fold(0.0, f64::max)
}

pub fn random_tensor(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor {
    let n = shape.iter().product();
    Tensor::new(shape.to_vec(), (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn project(out: &Tensor, r: &Tensor) -> f64 {
    out.data().iter().zip(r.data()).map(|(a, b)| a * b).sum()
}

fn with(shape: &[usize], data: &[f64]) -> Tensor {
    Tensor::new(shape.to_vec(), data.to_vec()).unwrap()
}

/// Worst relative error over input, weight and bias gradients of a random
/// same-padded convolution.
pub fn check_conv(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (h, w) = (rng.gen_range(3..=5), rng.gen_range(3..=5));
    let cin = rng.gen_range(1..=2);
    let cout = rng.gen_range(1..=3);
    let k = [1, 3, 3, 5][rng.gen_range(0..4)];
    let n = rng.gen_range(1..=2);
    let x = random_tensor(&mut rng, &[n, h, w, cin]);
    let wt = random_tensor(&mut rng, &[k, k, cin, cout]);
    let b: Vec<f64> = (0..cout).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let r = random_tensor(&mut rng, &[n, h, w, cout]);
    let g = nn::conv2d_backward(&r, &x, &wt).unwrap();

    let fx = |v: &[f64]| project(&nn::conv2d_forward(&with(x.shape(), v), &wt, &b).unwrap(), &r);
    let fw = |v: &[f64]| project(&nn::conv2d_forward(&x, &with(wt.shape(), v), &b).unwrap(), &r);
    let fb = |v: &[f64]| project(&nn::conv2d_forward(&x, &wt, v).unwrap(), &r);
    max_rel_error(g.input.data(), &central_diff(&fx, x.data()))
        .max(max_rel_error(g.weights.data(), &central_diff(&fw, wt.data())))
        .max(max_rel_error(&g.bias, &central_diff(&fb, &b)))
}

pub fn check_dense(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, d, u) = (rng.gen_range(1..=4), rng.gen_range(1..=8), rng.gen_range(1..=6));
    let x = random_tensor(&mut rng, &[n, d]);
    let wt = random_tensor(&mut rng, &[d, u]);
    let b: Vec<f64> = (0..u).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let r = random_tensor(&mut rng, &[n, u]);
    let g = nn::dense_backward(&r, &x, &wt).unwrap();
    let fx = |v: &[f64]| project(&nn::dense_forward(&with(x.shape(), v), &wt, &b).unwrap(), &r);
    let fw = |v: &[f64]| project(&nn::dense_forward(&x, &with(wt.shape(), v), &b).unwrap(), &r);
    let fb = |v: &[f64]| project(&nn::dense_forward(&x, &wt, v).unwrap(), &r);
    max_rel_error(g.input.data(), &central_diff(&fx, x.data()))
        .max(max_rel_error(g.weights.data(), &central_diff(&fw, wt.data())))
        .max(max_rel_error(&g.bias, &central_diff(&fb, &b)))
}

pub fn check_maxpool(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (h, w) = (2 * rng.gen_range(1..=3) + rng.gen_range(0..=1), 2 * rng.gen_range(1..=3));
    let c = rng.gen_range(1..=3);
    // Max is not differentiable at ties, so keep every pair of inputs at
    // least 1e-3 apart, far wider than the 2h span of the difference.
    let mut values: Vec<f64> = (0..h * w * c).map(|i| -1.0 + 1e-3 * i as f64).collect();
    values.shuffle(&mut rng);
    let x = with(&[1, h, w, c], &values);
    let pooled = nn::maxpool2d(&x, 2).unwrap();
    let r = random_tensor(&mut rng, pooled.output.shape());
    let g = nn::maxpool2d_backward(&r, &pooled.argmax, x.shape()).unwrap();
    let f = |v: &[f64]| project(&nn::maxpool2d(&with(x.shape(), v), 2).unwrap().output, &r);
    max_rel_error(g.data(), &central_diff(&f, x.data()))
}

pub fn check_tanh(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.gen_range(1..=16);
    let x = random_tensor(&mut rng, &[len]).map(|v| 3.0 * v);
    let r = random_tensor(&mut rng, &[len]);
    let y = nn::tanh_activation(&x);
    let g = nn::activation::tanh_backward(&r, &y);
    let f = |v: &[f64]| project(&nn::tanh_activation(&with(x.shape(), v)), &r);
    max_rel_error(g.data(), &central_diff(&f, x.data()))
}

/// Softmax followed by cross-entropy, checked against the logits.
pub fn check_softmax_cross_entropy(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, c) = (rng.gen_range(1..=5), rng.gen_range(2..=10));
    let logits = random_tensor(&mut rng, &[n, c]).map(|v| 2.0 * v);
    let labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..c) as u8).collect();
    let (_, g) = nn::cross_entropy_loss(&nn::softmax_rows(&logits), &labels).unwrap();
    let f = |v: &[f64]| {
        nn::cross_entropy_loss(&nn::softmax_rows(&with(logits.shape(), v)), &labels)
            .unwrap()
            .0
    };
    max_rel_error(g.data(), &central_diff(&f, logits.data()))
}

/// End-to-end: conv → pool → conv → flatten → dense(tanh) → dense(softmax),
/// loss gradients for every parameter.
pub fn check_network(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = NetworkSpec {
        layers: vec![
            LayerSpec::conv(2, 3),
            LayerSpec::MaxPool { pool: 2 },
            LayerSpec::conv(2, 3),
            LayerSpec::Flatten,
            LayerSpec::dense(5, Activation::Tanh),
            LayerSpec::dense(3, Activation::Softmax),
        ],
        input_shape: [4, 4, 1],
        class_count: 3,
    };
    let params = nn::init_params(&net, seed).unwrap();
    let x = random_tensor(&mut rng, &[2, 4, 4, 1]);
    let labels = [rng.gen_range(0..3u8), rng.gen_range(0..3u8)];
    let loss_of = |p: &nn::Params| {
        let cache = nn::forward(&net, p, &x).unwrap();
        nn::cross_entropy_loss(cache.probs(), &labels).unwrap()
    };
    let cache = nn::forward(&net, &params, &x).unwrap();
    let (_, grad_logits) = loss_of(&params);
    let grads = nn::backward(&net, &params, &cache, grad_logits).unwrap();

    let analytic: Vec<f64> = grads.tensors().flat_map(|t| t.data().to_vec()).collect();
    let flat: Vec<f64> = params.tensors().flat_map(|t| t.data().to_vec()).collect();
    let f = |v: &[f64]| {
        let mut p = params.clone();
        let mut at = 0;
        for s in p.slices_mut() {
            s.copy_from_slice(&v[at..at + s.len()]);
            at += s.len();
        }
        loss_of(&p).0
    };
    max_rel_error(&analytic, &central_diff(&f, &flat))
}

pub const CHECKS: [(&str, fn(u64) -> f64); 6] = [
    ("conv2d", check_conv),
    ("dense", check_dense),
    ("maxpool2d", check_maxpool),
    ("tanh", check_tanh),
    ("softmax+cross_entropy", check_softmax_cross_entropy),
    ("network", check_network),
];

/// Worst error over `instances` seeds for each check.
pub fn run_all(instances: u64) -> Vec<(&'static str, f64)> {
    CHECKS
        .iter()
        .map(|&(name, check)| (name, (0..instances).map(check).fold(0.0, f64::max)))
        .collect()
}
