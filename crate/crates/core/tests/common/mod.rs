#![allow(dead_code)]

use pml_core::relaxation::ObjectiveContext;
use pml_core::Matrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A context with `l` random levels, `k` observed columns, and a strictly
/// positive feasible matrix for it (budget at most 1/2).
pub fn random_instance(rng: &mut ChaCha8Rng, l: usize, k: usize) -> (ObjectiveContext, Matrix) {
    let mut freqs = vec![0u64];
    let mut m = 0;
    for _ in 0..k {
        m += rng.gen_range(1..4);
        freqs.push(m);
    }
    let mut targets = vec![0.0];
    targets.extend((0..k).map(|_| rng.gen_range(1..5) as f64));
    let mut s = Matrix::zeros(l, k + 1);
    for j in 1..=k {
        let raw: Vec<f64> = (0..l).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        for i in 0..l {
            s.set(i, j, raw[i] / total * targets[j]);
        }
    }
    for i in 0..l {
        s.set(i, 0, rng.gen_range(0.05..3.0));
    }
    let mass: f64 = s.data().iter().sum();
    let levels: Vec<f64> = (0..l).map(|_| rng.gen_range(0.05..1.0) / (2.0 * mass)).collect();
    let ctx = ObjectiveContext::from_parts(levels, freqs, targets).unwrap();
    (ctx, s)
}

/// Same shape as `s`, random positive entries with the same column targets.
pub fn random_feasible_like(rng: &mut ChaCha8Rng, ctx: &ObjectiveContext) -> Matrix {
    let (l, cols) = (ctx.rows(), ctx.cols());
    let mut s = Matrix::zeros(l, cols);
    for j in 1..cols {
        let raw: Vec<f64> = (0..l).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        for i in 0..l {
            s.set(i, j, raw[i] / total * ctx.targets()[j]);
        }
    }
    let observed: f64 = s.data().iter().sum();
    let rmax = ctx.levels().iter().copied().fold(0.0, f64::max);
    let room = ((1.0 / rmax - observed) / l as f64).max(0.0);
    for i in 0..l {
        s.set(i, 0, rng.gen_range(0.0..1.0) * room);
    }
    s
}
