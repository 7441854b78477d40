//! Frank-Wolfe with exact line search.
//!
//! The unseen column is not iterated on directly. For fixed observed entries
//! the best unseen mass in row `i` is `a_i / expm1(lambda r_i)`, where `a_i` is
//! the row's observed mass and `lambda` the single budget multiplier solving
//! `sum_i r_i a_i / (1 - exp(-lambda r_i)) = 1`. Maximizing that partial
//! maximum over the observed block keeps every step bounded by `phi_j`.

use alloc::vec::Vec;

use super::dual::{primal_from_dual, solve_dual};
use super::{grad_log_g, log_g, lp_oracle, ObjectiveContext};
use crate::error::Result;
use crate::math::{ln, sqrt};
use crate::matrix::Matrix;

/// Steps stop short of 1 so no row of the iterate is emptied.
const MAX_STEP: f64 = 1.0 - 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    /// Barrier warm start on the dual, then Frank-Wolfe until the gap test passes.
    BarrierThenFrankWolfe,
    /// Frank-Wolfe from `initial_point`.
    FrankWolfe,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop once the duality gap is below `gap_tol * max(1, |log g|)`.
    pub gap_tol: f64,
    /// Frank-Wolfe iteration cap.
    pub max_iter: usize,
    pub keep_trace: bool,
    pub method: SolverMethod,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            gap_tol: 1e-4,
            max_iter: 5000,
            keep_trace: true,
            method: SolverMethod::BarrierThenFrankWolfe,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub log_g: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    pub matrix: Matrix,
    pub log_g: f64,
    /// `<grad, lp_oracle(grad) - S>` at the returned matrix.
    pub gap: f64,
    pub iterations: usize,
    /// Newton steps spent in the barrier warm start.
    pub newton_steps: usize,
    /// False when `max_iter` ran out (or the line search stalled) first.
    pub converged: bool,
    pub trace: Vec<TraceRow>,
}

/// Strictly positive starting point: most of each column on the smallest
/// level, the rest spread over all levels, unseen column at its optimum.
pub fn initial_point(ctx: &ObjectiveContext) -> Matrix {
    let levels = ctx.levels();
    let l = levels.len();
    let low = (0..l).fold(0, |b, i| if levels[i] < levels[b] { i } else { b });
    let seen: f64 = ctx.targets()[1..].iter().sum();
    let mean_r = levels.iter().sum::<f64>() / l as f64;
    let base = seen * levels[low];
    let spread = seen * (mean_r - levels[low]);
    let goal = 0.5 * (1.0 + base);
    let eps = if spread > 0.0 { ((goal - base) / spread).clamp(0.0, 0.5) } else { 0.5 };
    let mut s = Matrix::zeros(l, ctx.cols());
    for j in 1..ctx.cols() {
        let phi = ctx.targets()[j];
        for i in 0..l {
            s.set(i, j, phi * eps / l as f64);
        }
        s.add(low, j, phi * (1.0 - eps));
    }
    complete_unseen(&mut s, ctx);
    s
}

pub fn solve_relaxation(ctx: &ObjectiveContext, opts: &SolverOptions) -> Result<SolverReport> {
    let mut newton_steps = 0;
    let mut start = None;
    if opts.method == SolverMethod::BarrierThenFrankWolfe {
        if let Some(point) = solve_dual(ctx, 0.5 * opts.gap_tol) {
            newton_steps = point.newton_steps;
            // Frank-Wolfe re-solves the unseen column, so only the observed
            // block has to fit in the budget.
            start = primal_from_dual(ctx, &point).filter(|s| {
                let seen: f64 = (0..s.rows()).map(|i| ctx.levels()[i] * s.row(i)[1..].iter().sum::<f64>()).sum();
                seen < 1.0
            });
        }
    }
    let mut report = frank_wolfe(ctx, start.unwrap_or_else(|| initial_point(ctx)), opts)?;
    report.newton_steps = newton_steps;
    Ok(report)
}

fn frank_wolfe(ctx: &ObjectiveContext, start: Matrix, opts: &SolverOptions) -> Result<SolverReport> {
    let mut s = start;
    let mut lambda = complete_unseen(&mut s, ctx);
    let mut value = log_g(&s, ctx)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let (l, cols) = (ctx.rows(), ctx.cols());
    let mut d = Matrix::zeros(l, cols);
    for it in 0..opts.max_iter {
        iterations = it;
        let h = reduced_gradient(&s, ctx, lambda)?;
        let v = lp_oracle(&h, ctx);
        for i in 0..l {
            for j in 1..cols {
                d.set(i, j, v.get(i, j) - s.get(i, j));
            }
        }
        let gap = h.dot(&d);
        if opts.keep_trace {
            trace.push(TraceRow { iteration: it, log_g: value, gap });
        }
        if gap <= opts.gap_tol * value.abs().max(1.0) {
            converged = true;
            break;
        }
        let gamma = line_search(&s, &d, ctx);
        if gamma <= 0.0 {
            break;
        }
        let mut next = s.clone();
        for i in 0..l {
            for j in 1..cols {
                next.set(i, j, (s.get(i, j) + gamma * d.get(i, j)).max(0.0));
            }
        }
        let next_lambda = complete_unseen(&mut next, ctx);
        let next_value = log_g(&next, ctx)?;
        if next_value < value - 1e-12 * value.abs().max(1.0) {
            break;
        }
        s = next;
        lambda = next_lambda;
        value = next_value;
        iterations = it + 1;
    }
    let gap = full_gap(&s, ctx)?;
    Ok(SolverReport { matrix: s, log_g: value, gap, iterations, newton_steps: 0, converged, trace })
}

/// Duality gap of `log g` over the full polytope (unseen column included).
pub fn full_gap(s: &Matrix, ctx: &ObjectiveContext) -> Result<f64> {
    let g = grad_log_g(s, ctx)?;
    let v = lp_oracle(&g, ctx);
    Ok(g.dot(&v) - g.dot(s))
}

/// Gradient of the partially maximized objective on columns `j >= 1`;
/// column 0 is zero so `lp_oracle` leaves it empty.
fn reduced_gradient(s: &Matrix, ctx: &ObjectiveContext, lambda: f64) -> Result<Matrix> {
    let mut h = grad_log_g(s, ctx)?;
    for i in 0..s.rows() {
        let r = ctx.levels()[i];
        let penalty = if lambda.is_finite() { lambda * r } else { f64::MAX / 4.0 };
        h.set(i, 0, 0.0);
        for j in 1..s.cols() {
            let val = h.get(i, j) - penalty;
            h.set(i, j, val);
        }
    }
    Ok(h)
}

/// Sets column 0 to its optimum for the observed block and returns `lambda`
/// (infinite when the observed block alone exhausts the budget).
pub fn complete_unseen(s: &mut Matrix, ctx: &ObjectiveContext) -> f64 {
    let levels = ctx.levels();
    let seen: Vec<f64> = (0..s.rows()).map(|i| s.row(i)[1..].iter().sum()).collect();
    let lambda = unseen_multiplier(&seen, levels);
    for i in 0..s.rows() {
        let x0 = if lambda.is_finite() && seen[i] > 0.0 {
            seen[i] / libm::expm1(lambda * levels[i])
        } else {
            0.0
        };
        s.set(i, 0, x0);
    }
    lambda
}

/// Root of `sum_i r_i a_i / (1 - exp(-lambda r_i)) = 1`.
fn unseen_multiplier(seen: &[f64], levels: &[f64]) -> f64 {
    let floor: f64 = seen.iter().zip(levels).map(|(a, r)| a * r).sum();
    if floor >= 1.0 || floor <= 0.0 {
        return if floor <= 0.0 { 0.0 } else { f64::INFINITY };
    }
    let budget = |lambda: f64| -> f64 {
        seen.iter()
            .zip(levels)
            .filter(|(&a, _)| a > 0.0)
            .map(|(&a, &r)| r * a / -libm::expm1(-lambda * r))
            .sum()
    };
    let (mut lo, mut hi) = (1e-3f64, 1e3f64);
    while budget(lo) < 1.0 && lo > 1e-300 {
        lo *= 1e-3;
    }
    while budget(hi) > 1.0 && hi < 1e300 {
        hi *= 1e3;
    }
    for _ in 0..200 {
        let mid = sqrt(lo * hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if budget(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Maximizer over `[0, MAX_STEP]` of the concave `t -> F(S + t D)`, by
/// bisection on the derivative.
fn line_search(s: &Matrix, d: &Matrix, ctx: &ObjectiveContext) -> f64 {
    let mut work = s.clone();
    if slope(s, d, ctx, MAX_STEP, &mut work) >= 0.0 {
        return MAX_STEP;
    }
    let (mut lo, mut hi) = (0.0f64, MAX_STEP);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if slope(s, d, ctx, mid, &mut work) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn slope(s: &Matrix, d: &Matrix, ctx: &ObjectiveContext, t: f64, work: &mut Matrix) -> f64 {
    let (l, cols) = (s.rows(), s.cols());
    for i in 0..l {
        for j in 1..cols {
            work.set(i, j, (s.get(i, j) + t * d.get(i, j)).max(0.0));
        }
    }
    let lambda = complete_unseen(work, ctx);
    let penalty = if lambda.is_finite() { lambda } else { f64::MAX / 4.0 };
    let mut total = 0.0;
    for i in 0..l {
        let rs = work.row_sum(i);
        if rs <= 0.0 {
            continue;
        }
        let c = ctx.coeffs().row(i);
        let r = ctx.levels()[i];
        for j in 1..cols {
            let dd = d.get(i, j);
            let x = work.get(i, j);
            if dd != 0.0 && x > 0.0 {
                total += dd * (c[j] - ln(x / rs) - penalty * r);
            }
        }
    }
    total
}
