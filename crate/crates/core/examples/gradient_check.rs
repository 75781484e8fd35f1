//! Compares the hand-written conv and dense backward passes against central
//! finite differences.
//!
//!     cargo run --release --example gradient_check -- [instances]

use infoplane::nn::{conv2d_backward, conv2d_forward, dense_backward, dense_forward};
use infoplane::Tensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP: f64 = 1e-5;

fn random(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor {
    let n = shape.iter().product();
    Tensor::new(shape.to_vec(), (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn rel_error(analytic: &[f64], f: impl Fn(&[f64]) -> f64, at: &[f64]) -> f64 {
    let mut probe = at.to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..at.len() {
        probe[i] = at[i] + STEP;
        let up = f(&probe);
        probe[i] = at[i] - STEP;
        let down = f(&probe);
        probe[i] = at[i];
        let numeric = (up - down) / (2.0 * STEP);
        worst = worst.max((analytic[i] - numeric).abs() / (analytic[i].abs() + numeric.abs()).max(1e-8));
    }
    worst
}

// L = Σ r ⊙ out, so dL/d(out) = r.
fn dot(out: &Tensor, r: &Tensor) -> f64 {
    out.data().iter().zip(r.data()).map(|(a, b)| a * b).sum()
}

fn main() {
    let instances: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20);
    let (mut conv_worst, mut dense_worst): (f64, f64) = (0.0, 0.0);
    for seed in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random(&mut rng, &[2, 5, 4, 2]);
        let w = random(&mut rng, &[3, 3, 2, 3]);
        let b = vec![0.1, -0.2, 0.3];
        let r = random(&mut rng, &[2, 5, 4, 3]);
        let g = conv2d_backward(&r, &x, &w).unwrap();
        let shaped = |s: &[usize], v: &[f64]| Tensor::new(s.to_vec(), v.to_vec()).unwrap();
        conv_worst = conv_worst
            .max(rel_error(g.input.data(), |v| dot(&conv2d_forward(&shaped(x.shape(), v), &w, &b).unwrap(), &r), x.data()))
            .max(rel_error(g.weights.data(), |v| dot(&conv2d_forward(&x, &shaped(w.shape(), v), &b).unwrap(), &r), w.data()))
            .max(rel_error(&g.bias, |v| dot(&conv2d_forward(&x, &w, v).unwrap(), &r), &b));

        let x = random(&mut rng, &[3, 7]);
        let w = random(&mut rng, &[7, 4]);
        let b = vec![0.0; 4];
        let r = random(&mut rng, &[3, 4]);
        let g = dense_backward(&r, &x, &w).unwrap();
        dense_worst = dense_worst
            .max(rel_error(g.input.data(), |v| dot(&dense_forward(&shaped(x.shape(), v), &w, &b).unwrap(), &r), x.data()))
            .max(rel_error(g.weights.data(), |v| dot(&dense_forward(&x, &shaped(w.shape(), v), &b).unwrap(), &r), w.data()))
            .max(rel_error(&g.bias, |v| dot(&dense_forward(&x, &w, v).unwrap(), &r), &b));
    }
    println!("{instances} instances, h = {STEP}");
    println!("conv2d  max relative error {conv_worst:.3e}");
    println!("dense   max relative error {dense_worst:.3e}");
}
