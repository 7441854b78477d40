//! Exact linear maximization over the fractional polytope.
//!
//! With a multiplier `lambda` on the budget the problem splits by column:
//! column `j >= 1` puts all of `phi_j` on `argmax_i G_ij - lambda r_i`, and
//! column 0 is unbounded unless every `G_i0 - lambda r_i <= 0`. So `lambda`
//! never goes below `lambda0 = max(0, max_i G_i0 / r_i)`, and above that we
//! bisect for the point where the budget becomes tight.

use alloc::vec::Vec;

use super::ObjectiveContext;
use crate::matrix::Matrix;

const BISECTION_STEPS: usize = 100;

/// Vertex of the fractional polytope maximizing `<grad, X>`.
pub fn lp_oracle(grad: &Matrix, ctx: &ObjectiveContext) -> Matrix {
    let levels = ctx.levels();
    let (l, cols) = (ctx.rows(), ctx.cols());
    let mut lambda0 = 0.0f64;
    let mut top0 = 0usize;
    for i in 0..l {
        let ratio = grad.get(i, 0) / levels[i];
        if ratio > lambda0 || (ratio == lambda0 && ratio > 0.0 && levels[i] < levels[top0]) {
            lambda0 = ratio;
            top0 = i;
        }
    }
    let at0 = assign(grad, levels, lambda0);
    let b0 = budget(&at0, ctx);
    let mut v = Matrix::zeros(l, cols);
    if b0 <= 1.0 {
        place(&mut v, &at0, ctx, 1.0);
        if lambda0 > 0.0 {
            v.set(top0, 0, ((1.0 - b0) / levels[top0]).max(0.0));
        }
        return v;
    }

    let mut lo = lambda0;
    let mut hi = lambda0 + 1.0;
    let mut at_hi = assign(grad, levels, hi);
    let mut steps = 0;
    while budget(&at_hi, ctx) > 1.0 && steps < 2000 {
        hi = lambda0 + 2.0 * (hi - lambda0);
        at_hi = assign(grad, levels, hi);
        steps += 1;
    }
    let mut at_lo = at0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let at = assign(grad, levels, mid);
        if budget(&at, ctx) > 1.0 {
            lo = mid;
            at_lo = at;
        } else {
            hi = mid;
            at_hi = at;
        }
    }
    let (b_lo, b_hi) = (budget(&at_lo, ctx), budget(&at_hi, ctx));
    let theta = if b_lo > b_hi { ((1.0 - b_hi) / (b_lo - b_hi)).clamp(0.0, 1.0) } else { 0.0 };
    place(&mut v, &at_lo, ctx, theta);
    place(&mut v, &at_hi, ctx, 1.0 - theta);
    v
}

/// Best row per column `j >= 1`; ties go to the smaller level.
fn assign(grad: &Matrix, levels: &[f64], lambda: f64) -> Vec<usize> {
    (1..grad.cols())
        .map(|j| {
            let mut best = 0;
            let mut best_val = f64::NEG_INFINITY;
            for (i, &r) in levels.iter().enumerate() {
                let val = grad.get(i, j) - lambda * r;
                if val > best_val || (val == best_val && r < levels[best]) {
                    best = i;
                    best_val = val;
                }
            }
            best
        })
        .collect()
}

fn budget(rows: &[usize], ctx: &ObjectiveContext) -> f64 {
    rows.iter().enumerate().map(|(j, &i)| ctx.targets()[j + 1] * ctx.levels()[i]).sum()
}

fn place(v: &mut Matrix, rows: &[usize], ctx: &ObjectiveContext, weight: f64) {
    if weight == 0.0 {
        return;
    }
    for (j, &i) in rows.iter().enumerate() {
        v.add(i, j + 1, weight * ctx.targets()[j + 1]);
    }
}
