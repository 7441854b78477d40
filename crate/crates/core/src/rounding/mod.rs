//! Rounding a nonnegative matrix down to integral row and column sums.
//!
//! Entries are quantized to multiples of `1/k` (`k = min(s', t')` over the
//! nonzero rows and columns) and read as a bipartite multigraph. A subgraph
//! with every degree divisible by `k`, divided by `k`, is the answer.

mod flow;
mod graph;
mod mincut;
mod modk;
mod orientation;
mod trees;

use alloc::vec::Vec;

pub use flow::FlowNetwork;
pub use graph::BipartiteMultigraph;
pub use mincut::{
    decompose_highly_connected, enumerate_small_cuts, stoer_wagner, CutSet, Decomposition, ENUMERATION_MAX_VERTICES,
};
pub use modk::{all_degrees_divisible, mod_k_zero_subgraph, mod_k_zero_subgraph_decomposed, ModKStats, ModKSubgraph, EXACT_SEARCH_LIMIT};
pub use orientation::{
    exhaustive, orientation_mod_k, orientation_residues, subgraph_with_residues, TargetPolicy, EXHAUSTIVE_EDGE_LIMIT,
};
pub use trees::{pack_spanning_trees, pack_trees};

use crate::error::{invalid, PmlError, Result};
use crate::math;
use crate::matrix::Matrix;

/// Integrality tolerance used by the certificate.
pub const INTEGRALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundingCertificate {
    pub below_input: bool,
    pub integral_rows: bool,
    pub integral_cols: bool,
    pub zeros_preserved: bool,
}

impl RoundingCertificate {
    pub fn holds(&self) -> bool {
        self.below_input && self.integral_rows && self.integral_cols && self.zeros_preserved
    }

    pub fn check(a: &Matrix, b: &Matrix) -> Self {
        let below_input = a.data().iter().zip(b.data()).all(|(x, y)| *y <= *x && *y >= 0.0);
        let integral_rows = b.row_sums().iter().all(|&r| math::near_integer(r, INTEGRALITY_TOL));
        let integral_cols = b.col_sums().iter().all(|&c| math::near_integer(c, INTEGRALITY_TOL));
        let zeros_preserved = (0..a.rows()).all(|i| a.row_sum(i) > 0.0 || b.row_sum(i) == 0.0)
            && (0..a.cols()).all(|j| a.col_sum(j) > 0.0 || b.col_sum(j) == 0.0);
        RoundingCertificate { below_input, integral_rows, integral_cols, zeros_preserved }
    }
}

#[derive(Debug, Clone)]
pub struct RoundingResult {
    pub rounded: Matrix,
    pub total_change: f64,
    pub certificate: RoundingCertificate,
    /// Lattice step: entries of `rounded` are multiples of `1/k`.
    pub k: u64,
    /// `floor(k A)` as a multigraph.
    pub quantized: BipartiteMultigraph,
    /// Surviving edges; `rounded = kept / k`.
    pub kept: BipartiteMultigraph,
    pub stats: ModKStats,
}

impl RoundingResult {
    /// Nonzero rows plus nonzero columns of the input.
    pub fn support_size(a: &Matrix) -> usize {
        let rows = (0..a.rows()).filter(|&i| a.row_sum(i) > 0.0).count();
        let cols = (0..a.cols()).filter(|&j| a.col_sum(j) > 0.0).count();
        rows + cols
    }
}

/// Largest `C` with `C / k <= A` entrywise.
pub fn quantize_to_lattice(a: &Matrix, k: u64) -> Result<BipartiteMultigraph> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    check_input(a)?;
    let kf = k as f64;
    let mut g = BipartiteMultigraph::new(a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let x = a.get(i, j);
            let scaled = math::floor(x * kf);
            if scaled >= u64::MAX as f64 / 4.0 {
                return Err(PmlError::TooLarge("entry too large to quantize".into()));
            }
            let mut c = scaled as u64;
            while c > 0 && c as f64 / kf > x {
                c -= 1;
            }
            while (c + 1) as f64 / kf <= x {
                c += 1;
            }
            g.set(i, j, c);
        }
    }
    Ok(g)
}

fn check_input(a: &Matrix) -> Result<()> {
    if !a.all_finite() {
        return Err(PmlError::NonFinite("matrix entry"));
    }
    if a.data().iter().any(|&x| x < 0.0) {
        return invalid("matrix entries must be nonnegative");
    }
    Ok(())
}

/// [`matrix_round_seeded`] with seed 0.
pub fn matrix_round(a: &Matrix) -> Result<RoundingResult> {
    matrix_round_seeded(a, 0)
}

/// `B <= A` with integral row and column sums and `sum(A - B) = O(s' + t')`.
pub fn matrix_round_seeded(a: &Matrix, seed: u64) -> Result<RoundingResult> {
    check_input(a)?;
    let rows = (0..a.rows()).filter(|&i| a.row_sum(i) > 0.0).count();
    let cols = (0..a.cols()).filter(|&j| a.col_sum(j) > 0.0).count();
    let k = rows.min(cols).max(1) as u64;
    let quantized = quantize_to_lattice(a, k)?;
    let modk = mod_k_zero_subgraph(&quantized, k, seed)?;
    let kept = modk.subgraph;
    if !all_degrees_divisible(&kept, k) || !kept.is_subgraph_of(&quantized) {
        return Err(PmlError::Internal("mod-k subgraph violates its contract".into()));
    }
    let kf = k as f64;
    let data: Vec<f64> = kept.table().iter().map(|&m| m as f64 / kf).collect();
    let mut rounded = Matrix::from_vec(a.rows(), a.cols(), data);
    snap_integral(&mut rounded, &kept, k);
    let total_change = a.data().iter().sum::<f64>() - rounded.data().iter().sum::<f64>();
    let certificate = RoundingCertificate::check(a, &rounded);
    Ok(RoundingResult { rounded, total_change, certificate, k, quantized, kept, stats: modk.stats })
}

/// Exactly integral entries (multiplicity divisible by `k`) are written as
/// such, so sums of integral rows carry no division error.
fn snap_integral(b: &mut Matrix, kept: &BipartiteMultigraph, k: u64) {
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            let m = kept.get(i, j);
            if m % k == 0 {
                b.set(i, j, (m / k) as f64);
            }
        }
    }
}
