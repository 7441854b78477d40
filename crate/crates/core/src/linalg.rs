//! Small dense linear algebra: LU with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::Matrix;

/// `P A = L U` of a square matrix, packed in place.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    singular: bool,
}

impl Lu {
    /// Pivots below `tol` (absolute) mark the matrix singular.
    pub fn factor(a: &Matrix, tol: f64) -> Lu {
        let n = a.rows();
        assert_eq!(n, a.cols(), "LU needs a square matrix");
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if lu.get(r, col).abs() > lu.get(piv, col).abs() {
                    piv = r;
                }
            }
            if lu.get(piv, col).abs() <= tol {
                singular = true;
                continue;
            }
            if piv != col {
                for c in 0..n {
                    let tmp = lu.get(col, c);
                    lu.set(col, c, lu.get(piv, c));
                    lu.set(piv, c, tmp);
                }
                perm.swap(col, piv);
            }
            let d = lu.get(col, col);
            for r in col + 1..n {
                let f = lu.get(r, col) / d;
                lu.set(r, col, f);
                if f != 0.0 {
                    for c in col + 1..n {
                        let v = lu.get(r, c) - f * lu.get(col, c);
                        lu.set(r, c, v);
                    }
                }
            }
        }
        Lu { lu, perm, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        if self.singular {
            return None;
        }
        let n = self.lu.rows();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let mut v = x[r];
            for c in 0..r {
                v -= self.lu.get(r, c) * x[c];
            }
            x[r] = v;
        }
        for r in (0..n).rev() {
            let mut v = x[r];
            for c in r + 1..n {
                v -= self.lu.get(r, c) * x[c];
            }
            x[r] = v / self.lu.get(r, r);
        }
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

pub fn solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let scale = a.data().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    Lu::factor(a, 1e-14 * scale).solve(b)
}

/// Symmetric positive definite solve with symmetric diagonal scaling first,
/// so badly scaled Hessians do not trip the pivot tolerance.
pub fn solve_scaled_spd(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    let d: Vec<f64> = (0..n).map(|i| {
        let v = a.get(i, i);
        if v > 0.0 { 1.0 / crate::math::sqrt(v) } else { 1.0 }
    }).collect();
    let mut scaled = a.clone();
    for i in 0..n {
        for j in 0..n {
            scaled.set(i, j, a.get(i, j) * d[i] * d[j]);
        }
    }
    let rhs: Vec<f64> = b.iter().zip(&d).map(|(v, di)| v * di).collect();
    let y = Lu::factor(&scaled, 1e-15).solve(&rhs)?;
    Some(y.iter().zip(&d).map(|(v, di)| v * di).collect())
}

/// `A^T A` for the rows of `a`.
pub fn gram(a: &Matrix) -> Matrix {
    let n = a.cols();
    let mut g = Matrix::zeros(n, n);
    for r in 0..a.rows() {
        let row = a.row(r);
        for i in 0..n {
            if row[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                g.add(i, j, row[i] * row[j]);
            }
        }
    }
    g
}

/// Minimum-norm-ish least squares `min |A x - b|` via regularized normal
/// equations; good enough for the small, well-scaled systems used here.
pub fn least_squares(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.cols();
    let mut g = gram(a);
    let scale = (0..n).map(|i| g.get(i, i)).fold(0.0, f64::max).max(1.0);
    for i in 0..n {
        g.add(i, i, 1e-13 * scale);
    }
    let mut rhs = vec![0.0; n];
    for r in 0..a.rows() {
        for (i, v) in rhs.iter_mut().enumerate() {
            *v += a.get(r, i) * b[r];
        }
    }
    solve(&g, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_pivoting_system() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]);
        let x = solve(&a, &[5.0, 3.0, 6.0]).unwrap();
        for (got, want) in x.iter().zip([1.4, 1.6, 1.8]) {
            assert!((got - want).abs() < 1e-12, "{x:?}");
        }
    }

    #[test]
    fn detects_singular() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(solve(&a, &[1.0, 2.0]).is_none());
    }
}
