//! Log-barrier Newton method on the dual of the relaxation.
//!
//! Dual variables are column prices `mu_j` (`j >= 1`) and the budget
//! multiplier `lambda`. Row `i` stays bounded iff
//! `s_i = lambda r_i - ln(1 + sum_j exp(c_ij - mu_j)) > 0`, and the dual
//! objective is `sum_j phi_j mu_j + lambda`. On the central path the primal
//! point `x_ij = p_ij / (t s_i)`, with `p_i` the softmax of `c_ij - mu_j`
//! (column 0 has price 0), meets every column sum exactly, spends
//! `1 - 1/(t lambda)` of the budget and has duality gap `(l + 1) / t`.

use alloc::vec;
use alloc::vec::Vec;

use super::ObjectiveContext;
use crate::linalg;
use crate::math::{exp, ln};
use crate::matrix::Matrix;

#[derive(Debug, Clone)]
pub struct DualPoint {
    pub mu: Vec<f64>,
    pub lambda: f64,
    pub t: f64,
    pub newton_steps: usize,
}

const MAX_PRICE_STEP: f64 = 20.0;
/// Newton steps allowed per centering stage.
const MAX_CENTERING_STEPS: usize = 5000;

struct Eval {
    slack: Vec<f64>,
    /// Softmax per row over columns `0..=k`.
    probs: Matrix,
}

fn evaluate(ctx: &ObjectiveContext, mu: &[f64], lambda: f64) -> Option<Eval> {
    let (l, cols) = (ctx.rows(), ctx.cols());
    let mut slack = vec![0.0; l];
    let mut probs = Matrix::zeros(l, cols);
    for i in 0..l {
        let c = ctx.coeffs().row(i);
        let mut top = 0.0f64;
        for j in 1..cols {
            top = top.max(c[j] - mu[j - 1]);
        }
        let row = probs.row_mut(i);
        row[0] = exp(-top);
        let mut rest = 0.0;
        for j in 1..cols {
            row[j] = exp(c[j] - mu[j - 1] - top);
            rest += row[j];
        }
        let z = row[0] + rest;
        for v in row.iter_mut() {
            *v /= z;
        }
        // ln(1 + sum_j exp(c_ij - mu_j)), accurate when the sum is tiny.
        let lse = if top == 0.0 { libm::log1p(rest) } else { top + ln(z) };
        let s = lambda * ctx.levels()[i] - lse;
        if !(s > 0.0) || !s.is_finite() {
            return None;
        }
        slack[i] = s;
    }
    Some(Eval { slack, probs })
}

fn row_lse(ctx: &ObjectiveContext, mu: &[f64], i: usize) -> f64 {
    let c = ctx.coeffs().row(i);
    let terms = (1..ctx.cols()).map(|j| c[j] - mu[j - 1]).chain(core::iter::once(0.0));
    crate::math::log_sum_exp(terms)
}

/// Barrier difference between two points, computed term by term so that
/// small decreases survive a large `t * dual`.
fn barrier_change(
    ctx: &ObjectiveContext,
    t: f64,
    from: (&[f64], f64, &Eval),
    to: (&[f64], f64, &Eval),
) -> f64 {
    let moved: f64 = from
        .0
        .iter()
        .zip(to.0)
        .zip(&ctx.targets()[1..])
        .map(|((a, b), p)| (b - a) * p)
        .sum::<f64>()
        + (to.1 - from.1);
    let logs: f64 = from.2.slack.iter().zip(&to.2.slack).map(|(&a, &b)| ln(b / a)).sum();
    t * moved - logs - ln(to.1 / from.1)
}

/// Runs the barrier method until the central-path gap `(l+1)/t` is at most
/// `rel_gap * max(1, |dual objective|)`.
pub fn solve_dual(ctx: &ObjectiveContext, rel_gap: f64) -> Option<DualPoint> {
    let (l, k) = (ctx.rows(), ctx.cols() - 1);
    let phi = &ctx.targets()[1..];
    // Start each column near an element of probability m_j / n on its own row
    // (lambda ~ n), then raise lambda until every row is strictly feasible.
    let n: f64 = ctx.freqs()[1..].iter().zip(phi).map(|(&m, &p)| m as f64 * p).sum();
    let mut mu: Vec<f64> = ctx.freqs()[1..]
        .iter()
        .map(|&m| {
            let m = m as f64;
            m * ln(m / n) - m
        })
        .collect();
    let mut lambda = n.max(1.0);
    for i in 0..l {
        let need = row_lse(ctx, &mu, i) / ctx.levels()[i];
        lambda = lambda.max(1.01 * need + 1e-9);
    }
    let dim = k + 1;
    let mut ev = evaluate(ctx, &mu, lambda)?;
    let dual0: f64 = mu.iter().zip(phi).map(|(m, p)| m * p).sum::<f64>() + lambda;
    let mut t = ((l + 1) as f64 / dual0.abs().max(1.0)).max(1e-6);
    let mut steps = 0;
    loop {
        for _ in 0..MAX_CENTERING_STEPS {
            let (grad, hess) = derivatives(ctx, t, lambda, &ev);
            let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
            let mut step = linalg::solve_scaled_spd(&hess, &neg)?;
            // Trust region: prices move on a log scale, lambda relatively.
            let mut shrink = 1.0f64;
            for &d in &step[..k] {
                shrink = shrink.max(d.abs() / MAX_PRICE_STEP);
            }
            shrink = shrink.max(step[k].abs() / (0.5 * lambda));
            if shrink > 1.0 {
                step.iter_mut().for_each(|d| *d /= shrink);
            }
            let decrement: f64 = -grad.iter().zip(&step).map(|(g, s)| g * s).sum::<f64>();
            steps += 1;
            if decrement < 1e-12 {
                break;
            }
            let mut a = 1.0;
            let mut moved = false;
            for _ in 0..80 {
                let cand_mu: Vec<f64> = mu.iter().zip(&step).map(|(m, s)| m + a * s).collect();
                let cand_lambda = lambda + a * step[k];
                if cand_lambda > 0.0 {
                    if let Some(cand) = evaluate(ctx, &cand_mu, cand_lambda) {
                        let change = barrier_change(ctx, t, (&mu, lambda, &ev), (&cand_mu, cand_lambda, &cand));
                        if change <= -0.25 * a * decrement {
                            mu = cand_mu;
                            lambda = cand_lambda;
                            ev = cand;
                            moved = true;
                            break;
                        }
                    }
                }
                a *= 0.5;
            }
            if !moved || decrement < 1e-9 * (dim as f64) {
                break;
            }
        }
        let dual: f64 = mu.iter().zip(phi).map(|(m, p)| m * p).sum::<f64>() + lambda;
        if (l + 1) as f64 / t <= rel_gap * dual.abs().max(1.0) {
            return Some(DualPoint { mu, lambda, t, newton_steps: steps });
        }
        t *= 8.0;
        if t > 1e18 {
            return None;
        }
    }
}

/// Gradient and Hessian of the barrier in `(mu_1..mu_k, lambda)`.
fn derivatives(ctx: &ObjectiveContext, t: f64, lambda: f64, ev: &Eval) -> (Vec<f64>, Matrix) {
    let (l, k) = (ctx.rows(), ctx.cols() - 1);
    let dim = k + 1;
    let mut grad = vec![0.0; dim];
    for (j, g) in grad.iter_mut().take(k).enumerate() {
        *g = t * ctx.targets()[j + 1];
    }
    grad[k] = t - 1.0 / lambda;
    let mut hess = Matrix::zeros(dim, dim);
    hess.add(k, k, 1.0 / (lambda * lambda));
    let mut ds = vec![0.0; dim];
    for i in 0..l {
        let s = ev.slack[i];
        let p = ev.probs.row(i);
        // ds_i/dmu_j = p_ij, ds_i/dlambda = r_i.
        ds[..k].copy_from_slice(&p[1..]);
        ds[k] = ctx.levels()[i];
        for a in 0..dim {
            grad[a] -= ds[a] / s;
        }
        let inv2 = 1.0 / (s * s);
        let inv = 1.0 / s;
        for a in 0..dim {
            if ds[a] == 0.0 {
                continue;
            }
            for b in 0..dim {
                hess.add(a, b, ds[a] * ds[b] * inv2);
            }
        }
        for a in 0..k {
            let pa = p[a + 1];
            if pa == 0.0 {
                continue;
            }
            hess.add(a, a, pa * inv);
            for b in 0..k {
                hess.add(a, b, -pa * p[b + 1] * inv);
            }
        }
    }
    (grad, hess)
}

/// Primal point on the central path, columns rescaled to their exact sums.
pub fn primal_from_dual(ctx: &ObjectiveContext, point: &DualPoint) -> Option<Matrix> {
    let ev = evaluate(ctx, &point.mu, point.lambda)?;
    let (l, cols) = (ctx.rows(), ctx.cols());
    let mut x = Matrix::zeros(l, cols);
    for i in 0..l {
        let w = 1.0 / (point.t * ev.slack[i]);
        for j in 0..cols {
            x.set(i, j, w * ev.probs.get(i, j));
        }
    }
    for j in 1..cols {
        let sum = x.col_sum(j);
        if sum > 0.0 {
            let f = ctx.targets()[j] / sum;
            for i in 0..l {
                let v = x.get(i, j) * f;
                x.set(i, j, v);
            }
        }
    }
    Some(x)
}
