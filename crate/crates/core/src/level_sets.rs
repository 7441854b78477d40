//! New probability levels for the mass a rounding step removed.
//!
//! Given `A` and a round-down `B <= A` with integral row and column sums,
//! the old rows take `B`'s values and one extra row per column `j` collects
//! what was removed from that column, at the weighted mean of the levels it
//! came from.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::grid::DiscretizationGrid;
use crate::math::{ln, near_integer, round};
use crate::matrix::Matrix;
use crate::relaxation::{check_feasibility, first_order_term, log_g, ObjectiveContext};

/// Tolerance for the integrality and `B <= A` preconditions.
pub const CREATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct NewLevels {
    /// `(l + k + 1) x (k + 1)`: `B` on top, then one diagonal row per column.
    pub matrix: Matrix,
    /// Old levels followed by the `k + 1` new ones.
    pub grid: DiscretizationGrid,
    /// Mass removed from each column, `sum_i (A_ij - B_ij)`.
    pub removed: Vec<f64>,
}

impl NewLevels {
    pub fn old_rows(&self) -> usize {
        self.matrix.rows() - self.matrix.cols()
    }

    /// Context for the extended matrix under the same profile.
    pub fn context(&self, ctx: &ObjectiveContext) -> Result<ObjectiveContext> {
        ObjectiveContext::from_parts(self.grid.values().to_vec(), ctx.freqs().to_vec(), ctx.targets().to_vec())
    }
}

pub fn create_new_probability_values(a: &Matrix, b: &Matrix, ctx: &ObjectiveContext) -> Result<NewLevels> {
    ctx.check_shape(a)?;
    ctx.check_shape(b)?;
    if !a.all_finite() || !b.all_finite() {
        return invalid("matrices must be finite");
    }
    for (x, y) in a.data().iter().zip(b.data()) {
        if *y < 0.0 || *y > *x + CREATE_TOL {
            return invalid("rounded matrix must satisfy 0 <= B <= A");
        }
    }
    if !b.row_sums().iter().chain(b.col_sums().iter()).all(|&s| near_integer(s, CREATE_TOL)) {
        return invalid("rounded matrix must have integral row and column sums");
    }
    let (l, cols) = (a.rows(), a.cols());
    let levels = ctx.levels();
    let rmin = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out = Matrix::zeros(l + cols, cols);
    for i in 0..l {
        out.row_mut(i).copy_from_slice(b.row(i));
    }
    let mut values = levels.to_vec();
    let mut removed = vec![0.0; cols];
    for j in 0..cols {
        let (mut weight, mut mass) = (0.0, 0.0);
        for i in 0..l {
            let d = (a.get(i, j) - b.get(i, j)).max(0.0);
            weight += d;
            mass += d * levels[i];
        }
        removed[j] = weight;
        let kept = round(b.col_sum(j));
        let entry = if j == 0 { a.col_sum(0) - kept } else { ctx.targets()[j] - kept };
        if weight > 0.0 && entry > 0.0 {
            values.push((mass / weight).clamp(rmin, 1.0));
            out.set(l + j, j, entry);
        } else {
            values.push(rmin);
        }
    }
    Ok(NewLevels { matrix: out, grid: DiscretizationGrid::from_levels(values)?, removed })
}

/// Which of the construction's guarantees hold for one output.
#[derive(Debug, Clone, PartialEq)]
pub struct CreateConditions {
    /// Old-row sums equal those of `B`.
    pub old_rows_match: bool,
    /// Each new row is nonzero only on its own column.
    pub new_rows_diagonal: bool,
    /// New diagonal entries equal `phi_j - sum_i B_ij`.
    pub diagonal_entries: bool,
    /// Fractional feasibility under the new grid.
    pub feasible: bool,
    /// `sum_i r_i [A1]_i` is unchanged.
    pub mass_preserved: bool,
    /// New levels are the weighted means of the levels the mass left.
    pub new_values: bool,
    /// `log g(A) - log g(A')`, which may be negative.
    pub log_g_drop: f64,
    /// `sum_i alpha_i ln(Delta)` with `alpha_i = [A1]_i - [B1]_i`.
    pub drop_scale: f64,
    /// The linear part of the objective never decreases.
    pub first_order_monotone: bool,
}

impl CreateConditions {
    /// The exact conditions (the objective drop is only measured).
    pub fn holds(&self) -> bool {
        self.old_rows_match
            && self.new_rows_diagonal
            && self.diagonal_entries
            && self.feasible
            && self.mass_preserved
            && self.new_values
            && self.log_g_drop.is_finite()
    }
}

pub fn check_create_conditions(
    a: &Matrix,
    b: &Matrix,
    ctx: &ObjectiveContext,
    out: &NewLevels,
    tol: f64,
) -> Result<CreateConditions> {
    let (l, cols) = (a.rows(), a.cols());
    let m = &out.matrix;
    if m.rows() != l + cols || m.cols() != cols || out.grid.len() != l + cols {
        return invalid("extended matrix has the wrong shape");
    }
    let old_rows_match = (0..l).all(|i| (m.row_sum(i) - b.row_sum(i)).abs() <= tol);
    let new_rows_diagonal = (0..cols).all(|j| (0..cols).all(|c| c == j || m.get(l + j, c) == 0.0));
    let diagonal_entries = (0..cols).all(|j| {
        let phi = if j == 0 { a.col_sum(0) } else { ctx.targets()[j] };
        let want = phi - b.col_sum(j);
        (m.get(l + j, j) - want).abs() <= tol || (want.abs() <= tol && m.get(l + j, j) == 0.0)
    });
    let new_ctx = out.context(ctx)?;
    let feasible = check_feasibility(m, &new_ctx, tol)?.is_fractional_feasible(tol);
    let mass = |s: &Matrix, r: &[f64]| -> f64 { s.row_sums().iter().zip(r).map(|(x, y)| x * y).sum() };
    let before = mass(a, ctx.levels());
    let mass_preserved = (before - mass(m, out.grid.values())).abs() <= tol * before.max(1.0);
    let levels = ctx.levels();
    let new_values = (0..cols).all(|j| {
        let (mut w, mut s) = (0.0, 0.0);
        for i in 0..l {
            let d = a.get(i, j) - b.get(i, j);
            w += d;
            s += d * levels[i];
        }
        if m.get(l + j, j) == 0.0 {
            true
        } else {
            (out.grid.values()[l + j] - s / w).abs() <= tol * out.grid.values()[l + j].max(1e-300) + 1e-15
        }
    });
    let log_g_drop = log_g(a, ctx)? - log_g(m, &new_ctx)?;
    let alpha: f64 = (0..l).map(|i| a.row_sum(i) - b.row_sum(i)).sum();
    let total: f64 = a.row_sums().iter().sum();
    let delta = total.max((l * (cols - 1).max(1)) as f64).max(2.0);
    let drop_scale = alpha * ln(delta);
    let (fa, fm) = (first_order_term(a, ctx), first_order_term(m, &new_ctx));
    let first_order_monotone = fa <= fm + tol * fa.abs().max(1.0);
    Ok(CreateConditions {
        old_rows_match,
        new_rows_diagonal,
        diagonal_entries,
        feasible,
        mass_preserved,
        new_values,
        log_g_drop,
        drop_scale,
        first_order_monotone,
    })
}
