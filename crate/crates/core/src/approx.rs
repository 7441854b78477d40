//! End-to-end approximate PML.
//!
//! Both algorithms solve the convex relaxation and sparsify it to at most
//! `k + 1` rows. The first rounds that block with [`matrix_round_seeded`]
//! and turns the removed mass into new levels. The second walks the rows
//! from the smallest level up, pushing each fractional row remainder into the
//! next row, and rescales the levels so the result has mass one.

use alloc::vec;
use alloc::vec::Vec;

use crate::distribution::{Distribution, PseudoDistribution};
use crate::error::{invalid, PmlError, Result};
use crate::grid::DiscretizationGrid;
use crate::level_sets::{check_create_conditions, create_new_probability_values, CreateConditions, NewLevels, CREATE_TOL};
use crate::math::{floor, ln, round};
use crate::matrix::Matrix;
use crate::profile::Profile;
use crate::relaxation::{log_g, solve_relaxation, ObjectiveContext, SolverOptions, SolverReport};
use crate::rounding::{matrix_round_seeded, RoundingResult};
use crate::sparsify::sparsify;

/// Row sums this close to an integer count as integral.
pub const SNAP_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct PmlOptions {
    pub solver: SolverOptions,
    /// Seed for the randomized parts of the rounding.
    pub seed: u64,
    /// Cap on the number of grid levels; the grid ratio is widened to fit.
    pub max_levels: Option<usize>,
    /// Replaces the default grid entirely.
    pub grid: Option<DiscretizationGrid>,
    /// Second algorithm only: most elements the output may have. Unseen
    /// mass beyond it is dropped before rounding.
    pub max_support: Option<u64>,
}

impl Default for PmlOptions {
    fn default() -> Self {
        PmlOptions { solver: SolverOptions::default(), seed: 0, max_levels: None, grid: None, max_support: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    V1,
    V2,
}

/// Everything computed along the way.
#[derive(Debug, Clone)]
pub struct PmlTrace {
    pub algorithm: Algorithm,
    pub grid: DiscretizationGrid,
    pub relaxation: SolverReport,
    pub sparsified: Matrix,
    pub log_g_sparse: f64,
    /// Nonzero rows of the sparsified matrix, in processing order.
    pub support: Vec<usize>,
    /// The `support` rows of the sparsified matrix, as rounded.
    pub block: Matrix,
    pub rounding: Option<RoundingResult>,
    pub created: Option<NewLevels>,
    pub conditions: Option<CreateConditions>,
    /// Unseen mass dropped to keep row sums integral.
    pub unseen_trimmed: f64,
    /// Second algorithm: `c = sum_i r_i [S1]_i` before rescaling.
    pub scale: Option<f64>,
    pub final_matrix: Matrix,
    pub final_levels: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PmlResult {
    pub distribution: Distribution,
    pub pseudo: PseudoDistribution,
    pub trace: PmlTrace,
}

/// `r_i` repeated `[S1]_i` times, and its normalization.
pub fn distribution_from_matrix(s: &Matrix, levels: &[f64]) -> Result<(PseudoDistribution, Distribution)> {
    if levels.len() != s.rows() {
        return invalid("one level per row is required");
    }
    let mut weights = Vec::new();
    for (i, &rs) in s.row_sums().iter().enumerate() {
        let count = round(rs);
        if (rs - count).abs() > SNAP_TOL || count < 0.0 {
            return invalid(alloc::format!("row {i} has non-integral sum {rs}"));
        }
        for _ in 0..count as usize {
            weights.push(levels[i]);
        }
    }
    let pseudo = PseudoDistribution::new(weights)?;
    let dist = pseudo.normalized()?;
    Ok((pseudo, dist))
}

fn grid_for(opts: &PmlOptions, alpha: f64, lo: f64, hi: f64) -> Result<DiscretizationGrid> {
    match (&opts.grid, opts.max_levels) {
        (Some(g), _) => Ok(g.clone()),
        (None, Some(cap)) => DiscretizationGrid::geometric_capped(alpha, lo, hi, cap),
        (None, None) => DiscretizationGrid::geometric(alpha, lo, hi),
    }
}

struct Relaxed {
    ctx: ObjectiveContext,
    report: SolverReport,
    sparse: Matrix,
    log_g_sparse: f64,
    support: Vec<usize>,
}

fn relax(profile: &Profile, grid: &DiscretizationGrid, opts: &PmlOptions) -> Result<Relaxed> {
    let ctx = ObjectiveContext::new(profile, grid)?;
    let report = solve_relaxation(&ctx, &opts.solver)?;
    let sparse = sparsify(&report.matrix, &ctx)?;
    let log_g_sparse = log_g(&sparse, &ctx)?;
    let support = (0..sparse.rows()).filter(|&i| sparse.row_sum(i) > 0.0).collect();
    Ok(Relaxed { ctx, report, sparse, log_g_sparse, support })
}

fn sub_context(ctx: &ObjectiveContext, rows: &[usize]) -> Result<ObjectiveContext> {
    let levels = rows.iter().map(|&i| ctx.levels()[i]).collect();
    ObjectiveContext::from_parts(levels, ctx.freqs().to_vec(), ctx.targets().to_vec())
}

/// Moves a row's tiny distance to the nearest integer into its unseen entry,
/// when that keeps the entry nonnegative and the budget at most one.
fn snap_rows(a: &mut Matrix, levels: &[f64]) {
    let mut budget: f64 = a.row_sums().iter().zip(levels).map(|(s, r)| s * r).sum();
    for i in 0..a.rows() {
        let rs = a.row_sum(i);
        let d = round(rs) - rs;
        if d == 0.0 || d.abs() > SNAP_TOL || a.get(i, 0) + d < 0.0 || budget + d * levels[i] > 1.0 {
            continue;
        }
        a.add(i, 0, d);
        budget += d * levels[i];
    }
}

/// The first algorithm, on the default grid `alpha = k ln n / n` over `[1/(2n^2), 1]`.
pub fn approximate_pml_v1(profile: &Profile, opts: &PmlOptions) -> Result<PmlResult> {
    let n = profile.n() as f64;
    let alpha = if profile.n() < 2 { 0.5 } else { (profile.k() as f64 * ln(n) / n).min(0.5) };
    let grid = grid_for(opts, alpha, 1.0 / (2.0 * n * n), 1.0)?;
    let relaxed = relax(profile, &grid, opts)?;
    let sub = sub_context(&relaxed.ctx, &relaxed.support)?;
    let mut block = relaxed.sparse.select_rows(&relaxed.support);
    snap_rows(&mut block, sub.levels());

    let rounding = matrix_round_seeded(&block, opts.seed)?;
    if !rounding.certificate.holds() {
        return Err(PmlError::Internal("rounding certificate failed".into()));
    }
    let created = create_new_probability_values(&block, &rounding.rounded, &sub)?;
    let conditions = check_create_conditions(&block, &rounding.rounded, &sub, &created, CREATE_TOL)?;

    // The unseen column has no integral target, so its new row keeps only
    // the integral part of what was removed.
    let mut final_matrix = created.matrix.clone();
    let unseen_row = created.old_rows();
    let entry = final_matrix.get(unseen_row, 0);
    let kept = floor(entry + SNAP_TOL).max(0.0);
    final_matrix.set(unseen_row, 0, kept);
    let unseen_trimmed = (entry - kept).max(0.0);
    snap_integral_rows(&mut final_matrix);

    let final_levels = created.grid.values().to_vec();
    let (pseudo, distribution) = distribution_from_matrix(&final_matrix, &final_levels)?;
    let trace = PmlTrace {
        algorithm: Algorithm::V1,
        grid,
        relaxation: relaxed.report,
        sparsified: relaxed.sparse,
        log_g_sparse: relaxed.log_g_sparse,
        support: relaxed.support,
        block,
        rounding: Some(rounding),
        created: Some(created),
        conditions: Some(conditions),
        unseen_trimmed,
        scale: None,
        final_matrix,
        final_levels,
    };
    Ok(PmlResult { distribution, pseudo, trace })
}

/// Scales each row whose sum is within [`SNAP_TOL`] of an integer onto it.
fn snap_integral_rows(m: &mut Matrix) {
    for i in 0..m.rows() {
        let rs = m.row_sum(i);
        let target = round(rs);
        if rs > 0.0 && rs != target && (rs - target).abs() <= SNAP_TOL {
            let f = target / rs;
            m.row_mut(i).iter_mut().for_each(|x| *x *= f);
        }
    }
}

/// Scales the unseen column so its total is an integer (rounded down).
pub fn trim_unseen_to_integer(s: &mut Matrix) -> f64 {
    let total = s.col_sum(0);
    let target = floor(total + SNAP_TOL);
    if total <= 0.0 || target >= total {
        return 0.0;
    }
    let f = target / total;
    for i in 0..s.rows() {
        let x = s.get(i, 0);
        s.set(i, 0, x * f);
    }
    total - target
}

/// Rows in the given order: each row keeps the integral part of its sum and
/// hands the fractional part, spread proportionally over its columns, to
/// the next row. The last row is floored.
pub fn push_fractional_rows(s: &Matrix) -> Matrix {
    let mut out = s.clone();
    let rows = out.rows();
    for i in 0..rows {
        let rs = out.row_sum(i);
        if rs <= 0.0 {
            continue;
        }
        if (rs - round(rs)).abs() <= SNAP_TOL {
            continue;
        }
        let f = floor(rs) / rs;
        let moved: Vec<f64> = out.row(i).iter().map(|x| x * (1.0 - f)).collect();
        out.row_mut(i).iter_mut().for_each(|x| *x *= f);
        if i + 1 < rows {
            for (j, m) in moved.into_iter().enumerate() {
                out.add(i + 1, j, m);
            }
        }
    }
    out
}

/// The second algorithm, on the grid `alpha = k / n` over `[lbound, ubound]`.
pub fn approximate_pml_v2(profile: &Profile, lbound: f64, ubound: f64, opts: &PmlOptions) -> Result<PmlResult> {
    if !(lbound > 0.0 && lbound <= ubound && ubound <= 1.0) {
        return invalid("bounds must satisfy 0 < lbound <= ubound <= 1");
    }
    let alpha = (profile.k() as f64 / profile.n() as f64).min(0.5);
    let grid = grid_for(opts, alpha, lbound, ubound)?;
    let relaxed = relax(profile, &grid, opts)?;
    let mut support = relaxed.support.clone();
    let levels = relaxed.ctx.levels();
    support.sort_by(|&a, &b| levels[a].total_cmp(&levels[b]).then(a.cmp(&b)));

    let mut block = relaxed.sparse.select_rows(&support);
    let mut unseen_trimmed = 0.0;
    if let Some(cap) = opts.max_support {
        let room = cap.saturating_sub(profile.support()) as f64;
        let total = block.col_sum(0);
        if total > room {
            let f = room / total;
            for i in 0..block.rows() {
                let x = block.get(i, 0);
                block.set(i, 0, x * f);
            }
            unseen_trimmed = total - room;
        }
    }
    unseen_trimmed += trim_unseen_to_integer(&mut block);
    let mut final_matrix = push_fractional_rows(&block);
    snap_integral_rows(&mut final_matrix);

    let sorted_levels: Vec<f64> = support.iter().map(|&i| levels[i]).collect();
    let scale: f64 = final_matrix.row_sums().iter().zip(&sorted_levels).map(|(s, r)| s * r).sum();
    if !(scale > 0.0) {
        return Err(PmlError::Internal("rounded matrix is empty".into()));
    }
    // Empty rows keep their old level so every level stays in (0, 1].
    let final_levels: Vec<f64> = sorted_levels
        .iter()
        .enumerate()
        .map(|(i, r)| if final_matrix.row_sum(i) > 0.0 { (r / scale).min(1.0) } else { *r })
        .collect();
    let (pseudo, distribution) = distribution_from_matrix(&final_matrix, &final_levels)?;
    let trace = PmlTrace {
        algorithm: Algorithm::V2,
        grid,
        relaxation: relaxed.report,
        sparsified: relaxed.sparse,
        log_g_sparse: relaxed.log_g_sparse,
        support,
        block,
        rounding: None,
        created: None,
        conditions: None,
        unseen_trimmed,
        scale: Some(scale),
        final_matrix,
        final_levels,
    };
    Ok(PmlResult { distribution, pseudo, trace })
}

/// `log g` of the final matrix under its own levels.
pub fn final_log_g(profile: &Profile, trace: &PmlTrace) -> Result<f64> {
    let rows: Vec<usize> = (0..trace.final_matrix.rows()).filter(|&i| trace.final_matrix.row_sum(i) > 0.0).collect();
    let levels = rows.iter().map(|&i| trace.final_levels[i]).collect();
    let mut freqs = vec![0u64];
    freqs.extend(profile.entries().iter().map(|e| e.0));
    let mut targets = vec![0.0];
    targets.extend(profile.entries().iter().map(|e| e.1 as f64));
    let ctx = ObjectiveContext::from_parts(levels, freqs, targets)?;
    log_g(&trace.final_matrix.select_rows(&rows), &ctx)
}
