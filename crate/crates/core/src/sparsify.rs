//! Row-scaling sparsification down to at most `k + 1` nonzero rows.
//!
//! Every row is rescaled, `S'_i = alpha_i S_i`. Column sums (`j >= 1`) and the
//! budget are linear in `alpha` through the vectors
//! `a_i = (S_i1, ..., S_ik, r_i [S1]_i)`, and by row homogeneity so is
//! `f(S') = sum_i alpha_i f_i`. Any `k + 2` of the `a_i` are dependent, and a
//! dependency always has both signs because the budget coordinate is
//! positive, so we can slide along it in the direction that does not
//! increase `f` until some `alpha_i` reaches zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{PmlError, Result};
use crate::linalg;
use crate::matrix::Matrix;
use crate::relaxation::{check_feasibility, row_log_g, ObjectiveContext};

#[derive(Debug, Clone)]
pub struct Sparsified {
    pub matrix: Matrix,
    /// Final scaling per row (0 for dropped or empty rows).
    pub alpha: Vec<f64>,
    pub eliminated: usize,
}

pub fn sparsify(s: &Matrix, ctx: &ObjectiveContext) -> Result<Matrix> {
    sparsify_with_scaling(s, ctx).map(|r| r.matrix)
}

pub fn sparsify_with_scaling(s: &Matrix, ctx: &ObjectiveContext) -> Result<Sparsified> {
    let report = check_feasibility(s, ctx, 1e-7)?;
    if !report.is_fractional_feasible(1e-7) || report.min_entry < 0.0 {
        return Err(PmlError::Infeasible("sparsify needs a fractional-feasible matrix".into()));
    }
    let (l, cols) = (s.rows(), s.cols());
    let k = cols - 1;
    let dim = k + 1;
    let sums = s.row_sums();
    let mut order: Vec<usize> = (0..l).filter(|&i| sums[i] > 0.0).collect();
    order.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]).then(a.cmp(&b)));

    // Constraint vectors, each coordinate scaled by its maximum over rows.
    let raw = |i: usize, c: usize| if c < k { s.get(i, c + 1) } else { ctx.levels()[i] * sums[i] };
    let mut scale = vec![0.0f64; dim];
    for &i in &order {
        for (c, sc) in scale.iter_mut().enumerate() {
            *sc = sc.max(raw(i, c));
        }
    }
    let vec_of = |i: usize| -> Vec<f64> {
        (0..dim).map(|c| if scale[c] > 0.0 { raw(i, c) / scale[c] } else { 0.0 }).collect()
    };
    let cost: Vec<f64> = (0..l).map(|i| -row_log_g(s, ctx, i)).collect();

    let mut alpha = vec![0.0; l];
    for &i in &order {
        alpha[i] = 1.0;
    }
    let mut eliminated = 0;
    let mut work: Vec<usize> = Vec::with_capacity(dim + 1);
    let mut next = 0;
    loop {
        while work.len() < dim + 1 && next < order.len() {
            work.push(order[next]);
            next += 1;
        }
        if work.len() <= dim {
            break;
        }
        let vectors: Vec<Vec<f64>> = work.iter().map(|&i| vec_of(i)).collect();
        let beta = null_vector(&vectors);
        let mut beta = match beta {
            Some(b) => b,
            None => return Err(PmlError::Internal("no dependency among k+2 rows".into())),
        };
        let dir_cost: f64 = beta.iter().zip(&work).map(|(b, &i)| b * cost[i]).sum();
        if dir_cost > 0.0 {
            beta.iter_mut().for_each(|b| *b = -*b);
        }
        // Largest step keeping alpha >= 0; the first row to hit zero leaves.
        let mut step = f64::INFINITY;
        let mut leave = usize::MAX;
        for (p, &i) in work.iter().enumerate() {
            if beta[p] < 0.0 {
                let t = alpha[i] / -beta[p];
                if t < step {
                    step = t;
                    leave = p;
                }
            }
        }
        if leave == usize::MAX {
            return Err(PmlError::Internal("dependency without a negative coordinate".into()));
        }
        for (p, &i) in work.iter().enumerate() {
            alpha[i] = (alpha[i] + step * beta[p]).max(0.0);
        }
        alpha[work[leave]] = 0.0;
        work.remove(leave);
        work.retain(|&i| alpha[i] > 0.0);
        eliminated += 1;
    }

    let support: Vec<usize> = order.iter().copied().filter(|&i| alpha[i] > 0.0).collect();
    polish(&mut alpha, &support, s, ctx);
    let mut out = Matrix::zeros(l, cols);
    for &i in &support {
        for j in 0..cols {
            out.set(i, j, alpha[i] * s.get(i, j));
        }
    }
    Ok(Sparsified { matrix: out, alpha, eliminated })
}

/// One least-squares correction of `alpha` on the support so the column
/// sums are exact to rounding; skipped if it would make `alpha` negative.
fn polish(alpha: &mut [f64], support: &[usize], s: &Matrix, ctx: &ObjectiveContext) {
    if support.is_empty() {
        return;
    }
    let k = s.cols() - 1;
    let mut a = Matrix::zeros(k, support.len());
    let mut resid = vec![0.0; k];
    for j in 0..k {
        let mut total = 0.0;
        for (p, &i) in support.iter().enumerate() {
            a.set(j, p, s.get(i, j + 1));
            total += alpha[i] * s.get(i, j + 1);
        }
        resid[j] = ctx.targets()[j + 1] - total;
    }
    let big = ctx.targets().iter().fold(1.0f64, |m, v| m.max(*v));
    if resid.iter().all(|r| r.abs() <= 1e-13 * big) {
        return;
    }
    if let Some(delta) = linalg::least_squares(&a, &resid) {
        let ok = support.iter().zip(&delta).all(|(&i, d)| alpha[i] + d > 0.0);
        if ok {
            for (&i, d) in support.iter().zip(&delta) {
                alpha[i] += d;
            }
        }
    }
}

/// A nonzero `beta` with `sum_p beta_p v_p = 0`, for `dim + 1` vectors of
/// length `dim`. Gaussian elimination with full pivoting on the `dim x q`
/// matrix whose columns are the vectors.
fn null_vector(vectors: &[Vec<f64>]) -> Option<Vec<f64>> {
    let q = vectors.len();
    let d = vectors.first()?.len();
    let mut m = Matrix::zeros(d, q);
    for (p, v) in vectors.iter().enumerate() {
        for (r, &x) in v.iter().enumerate() {
            m.set(r, p, x);
        }
    }
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut is_pivot = vec![false; q];
    let mut row = 0;
    while row < d {
        let mut best = (0.0f64, usize::MAX, usize::MAX);
        for r in row..d {
            for c in 0..q {
                if !is_pivot[c] && m.get(r, c).abs() > best.0 {
                    best = (m.get(r, c).abs(), r, c);
                }
            }
        }
        if best.0 <= 1e-13 {
            break;
        }
        let (_, pr, pc) = best;
        if pr != row {
            for c in 0..q {
                let tmp = m.get(row, c);
                m.set(row, c, m.get(pr, c));
                m.set(pr, c, tmp);
            }
        }
        let pv = m.get(row, pc);
        for c in 0..q {
            let v = m.get(row, c) / pv;
            m.set(row, c, v);
        }
        for r in 0..d {
            if r != row {
                let f = m.get(r, pc);
                if f != 0.0 {
                    for c in 0..q {
                        let v = m.get(r, c) - f * m.get(row, c);
                        m.set(r, c, v);
                    }
                }
            }
        }
        is_pivot[pc] = true;
        pivot_col_of_row.push(pc);
        row += 1;
    }
    let free = (0..q).find(|&c| !is_pivot[c])?;
    let mut beta = vec![0.0; q];
    beta[free] = 1.0;
    for (r, &pc) in pivot_col_of_row.iter().enumerate() {
        beta[pc] = -m.get(r, free);
    }
    Some(beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_vector_is_a_dependency() {
        let vs = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let b = null_vector(&vs).unwrap();
        for c in 0..2 {
            let s: f64 = vs.iter().zip(&b).map(|(v, bb)| v[c] * bb).sum();
            assert!(s.abs() < 1e-12);
        }
        assert!(b.iter().any(|x| x.abs() > 0.5));
    }
}
