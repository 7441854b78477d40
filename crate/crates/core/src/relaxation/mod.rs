//! The convex relaxation of the profile likelihood over level-set matrices.
//!
//! For `S` in the fractional polytope (column `j >= 1` sums to `phi_j`, budget
//! `sum_i r_i [S1]_i <= 1`, column 0 free)
//!
//! `log g(S) = sum_ij c_ij x_ij - x_ij ln x_ij + sum_i [S1]_i ln [S1]_i`, `c_ij = m_j ln r_i`.

mod dual;
mod lp;
mod solver;

pub use lp::lp_oracle;
pub use dual::{primal_from_dual, solve_dual, DualPoint};
pub use solver::{
    complete_unseen, full_gap, initial_point, solve_relaxation, SolverMethod, SolverOptions, SolverReport,
    TraceRow,
};

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, PmlError, Result};
use crate::grid::DiscretizationGrid;
use crate::math::{ln, log_sum_exp, near_integer};
use crate::matrix::Matrix;
use crate::profile::Profile;

/// A level-set matrix: `l x (k+1)`, rows are grid levels, column 0 is unseen.
pub type LevelSetMatrix = Matrix;

pub const DEFAULT_DELTA: f64 = 1e-12;

/// Everything the objective needs about one (profile, grid) pair.
#[derive(Debug, Clone)]
pub struct ObjectiveContext {
    coeffs: Matrix,
    levels: Vec<f64>,
    freqs: Vec<u64>,
    targets: Vec<f64>,
    delta: f64,
}

impl ObjectiveContext {
    pub fn new(profile: &Profile, grid: &DiscretizationGrid) -> Result<Self> {
        let mut freqs = vec![0u64];
        freqs.extend(profile.entries().iter().map(|e| e.0));
        let mut targets = vec![0.0];
        targets.extend(profile.entries().iter().map(|e| e.1 as f64));
        Self::from_parts(grid.values().to_vec(), freqs, targets)
    }

    /// `freqs[0]` must be 0; `targets[0]` is ignored.
    pub fn from_parts(levels: Vec<f64>, freqs: Vec<u64>, targets: Vec<f64>) -> Result<Self> {
        if levels.is_empty() || freqs.len() != targets.len() || freqs.first() != Some(&0) {
            return invalid("objective context shape mismatch");
        }
        if levels.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return invalid("grid values must lie in (0, 1]");
        }
        let cols = freqs.len();
        let mut coeffs = Matrix::zeros(levels.len(), cols);
        for (i, &r) in levels.iter().enumerate() {
            for (j, &m) in freqs.iter().enumerate() {
                coeffs.set(i, j, m as f64 * ln(r));
            }
        }
        let rmin = levels.iter().copied().fold(f64::INFINITY, f64::min);
        let need: f64 = targets[1..].iter().sum::<f64>() * rmin;
        if need > 1.0 + 1e-12 {
            return Err(PmlError::Infeasible(alloc::format!(
                "smallest grid value {rmin} cannot fit {} observed elements",
                need / rmin
            )));
        }
        Ok(ObjectiveContext { coeffs, levels, freqs, targets, delta: DEFAULT_DELTA })
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn coeffs(&self) -> &Matrix {
        &self.coeffs
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn freqs(&self) -> &[u64] {
        &self.freqs
    }

    /// Column sums required for `j >= 1`.
    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn rows(&self) -> usize {
        self.levels.len()
    }

    pub fn cols(&self) -> usize {
        self.freqs.len()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub(crate) fn check_shape(&self, s: &Matrix) -> Result<()> {
        if s.rows() != self.rows() || s.cols() != self.cols() {
            return invalid("matrix shape does not match grid and profile");
        }
        Ok(())
    }
}

fn check_entries(s: &Matrix) -> Result<()> {
    if !s.all_finite() {
        return Err(PmlError::NonFinite("level-set matrix"));
    }
    if s.data().iter().any(|&x| x < 0.0) {
        return invalid("level-set matrix has a negative entry");
    }
    Ok(())
}

/// Contribution of row `i`.
pub fn row_log_g(s: &Matrix, ctx: &ObjectiveContext, i: usize) -> f64 {
    let row = s.row(i);
    let rs: f64 = row.iter().sum();
    if rs <= 0.0 {
        return 0.0;
    }
    let c = ctx.coeffs.row(i);
    row.iter()
        .zip(c)
        .filter(|(&x, _)| x > 0.0)
        .map(|(&x, &cij)| x * (cij - ln(x / rs)))
        .sum()
}

pub fn log_g(s: &Matrix, ctx: &ObjectiveContext) -> Result<f64> {
    ctx.check_shape(s)?;
    check_entries(s)?;
    Ok((0..s.rows()).map(|i| row_log_g(s, ctx, i)).sum())
}

/// `f = -log g`, the convex form.
pub fn f_value(s: &Matrix, ctx: &ObjectiveContext) -> Result<f64> {
    log_g(s, ctx).map(|v| -v)
}

/// Linear part `sum_ij c_ij x_ij`.
pub fn first_order_term(s: &Matrix, ctx: &ObjectiveContext) -> f64 {
    s.dot(&ctx.coeffs)
}

/// Gradient of `log g`.
///
/// Rows with positive sum use `c_ij - ln(max(x_ij, delta rs_i) / rs_i)`.
/// On an empty row `log g` is not differentiable, so a supergradient is
/// returned instead: prices `mu_j` (column) and `lambda` (budget) are fitted to
/// the nonempty rows, and the row gets `mu_j + lambda r_i + ln Z_i` with `Z_i`
/// normalising `sum_j exp(c_ij - g_ij) = 1`. Any such row is a valid
/// supergradient, and at the optimum the fitted prices are the dual ones.
pub fn grad_log_g(s: &Matrix, ctx: &ObjectiveContext) -> Result<Matrix> {
    ctx.check_shape(s)?;
    check_entries(s)?;
    let (l, cols) = (s.rows(), s.cols());
    let mut g = Matrix::zeros(l, cols);
    let sums = s.row_sums();
    let mut empty = Vec::new();
    for i in 0..l {
        let rs = sums[i];
        if rs <= 0.0 {
            empty.push(i);
            continue;
        }
        for j in 0..cols {
            let x = s.get(i, j).max(ctx.delta * rs);
            g.set(i, j, ctx.coeffs.get(i, j) - ln(x / rs));
        }
    }
    if empty.is_empty() {
        return Ok(g);
    }
    let (lambda, mu) = fit_prices(&g, &sums, ctx);
    for i in empty {
        let r = ctx.levels[i];
        let price = |j: usize| mu[j] + lambda * r;
        let log_z = log_sum_exp((0..cols).map(|j| ctx.coeffs.get(i, j) - price(j)));
        for j in 0..cols {
            g.set(i, j, price(j) + log_z);
        }
    }
    Ok(g)
}

/// Weighted least-squares fit of `G_ij ~ mu_j + lambda r_i` on nonempty rows,
/// with `mu_0 = 0`.
fn fit_prices(g: &Matrix, sums: &[f64], ctx: &ObjectiveContext) -> (f64, Vec<f64>) {
    let cols = g.cols();
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &w) in sums.iter().enumerate() {
        if w > 0.0 {
            let r = ctx.levels[i];
            num += w * r * g.get(i, 0);
            den += w * r * r;
        }
    }
    let lambda = if den > 0.0 { (num / den).max(0.0) } else { 0.0 };
    let mut mu = vec![0.0; cols];
    let total: f64 = sums.iter().filter(|&&w| w > 0.0).sum();
    if total > 0.0 {
        for (j, m) in mu.iter_mut().enumerate().skip(1) {
            *m = sums
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(|(i, &w)| w * (g.get(i, j) - lambda * ctx.levels[i]))
                .sum::<f64>()
                / total;
        }
    }
    (lambda, mu)
}

/// Column residuals, budget and row integrality of a candidate matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// `|sum_i S_ij - phi_j|` for `j = 1..=k`.
    pub column_residuals: Vec<f64>,
    /// `sum_i r_i [S1]_i`.
    pub budget: f64,
    pub integral_rows: Vec<bool>,
    pub min_entry: f64,
}

impl FeasibilityReport {
    pub fn max_residual(&self) -> f64 {
        self.column_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_fractional_feasible(&self, tol: f64) -> bool {
        self.max_residual() <= tol && self.budget <= 1.0 + tol && self.min_entry >= -tol
    }

    pub fn is_integral_feasible(&self, tol: f64) -> bool {
        self.is_fractional_feasible(tol) && self.integral_rows.iter().all(|&b| b)
    }
}

pub fn check_feasibility(s: &Matrix, ctx: &ObjectiveContext, tol: f64) -> Result<FeasibilityReport> {
    ctx.check_shape(s)?;
    if !s.all_finite() {
        return Err(PmlError::NonFinite("level-set matrix"));
    }
    let column_residuals = (1..s.cols()).map(|j| (s.col_sum(j) - ctx.targets[j]).abs()).collect();
    let sums = s.row_sums();
    let budget = sums.iter().zip(&ctx.levels).map(|(rs, r)| rs * r).sum();
    let integral_rows = sums.iter().map(|&rs| near_integer(rs, tol)).collect();
    let min_entry = s.data().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(FeasibilityReport { column_residuals, budget, integral_rows, min_entry })
}
