//! Finite sets of allowed probability values.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math::{ceil, ln, pow};

/// Probability levels `r_1, ..., r_l`.
///
/// Geometric grids are strictly increasing with ratio `1 + alpha` (the top
/// value may be clamped). Grids produced by level-set repair keep row order
/// instead, so `values` is only guaranteed sorted when `alpha` is `Some`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizationGrid {
    values: Vec<f64>,
    alpha: Option<f64>,
}

impl DiscretizationGrid {
    /// `r_i = rmin (1 + alpha)^(i-1)` while below `rmax`, then `rmax`.
    pub fn geometric(alpha: f64, rmin: f64, rmax: f64) -> Result<Self> {
        if !(rmin > 0.0 && rmin <= rmax && rmax <= 1.0) {
            return invalid("grid bounds must satisfy 0 < rmin <= rmax <= 1");
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return invalid("grid ratio parameter must be positive");
        }
        let mut values = Vec::new();
        let mut r = rmin;
        let mut i = 0i32;
        while r < rmax * (1.0 - 1e-12) {
            values.push(r);
            i += 1;
            r = rmin * pow(1.0 + alpha, i as f64);
        }
        values.push(rmax);
        Ok(DiscretizationGrid { values, alpha: Some(alpha) })
    }

    /// Geometric grid over `[rmin, rmax]` whose ratio is widened if needed so
    /// that it has at most `max_levels` values.
    pub fn geometric_capped(alpha: f64, rmin: f64, rmax: f64, max_levels: usize) -> Result<Self> {
        if max_levels < 2 || rmin >= rmax {
            return Self::geometric(alpha.max(f64::MIN_POSITIVE), rmin, rmax);
        }
        let needed = ceil(ln(rmax / rmin) / ln(1.0 + alpha)) as usize + 1;
        if needed <= max_levels {
            return Self::geometric(alpha, rmin, rmax);
        }
        let widened = pow(rmax / rmin, 1.0 / (max_levels - 1) as f64) - 1.0;
        Self::geometric(widened * (1.0 + 1e-12), rmin, rmax)
    }

    /// Arbitrary positive levels in row order.
    pub fn from_levels(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("grid must have at least one value");
        }
        if values.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return invalid("grid values must lie in (0, 1]");
        }
        Ok(DiscretizationGrid { values, alpha: None })
    }

    /// The grid used by the first algorithm: `alpha = k ln n / n` on `[1/(2n^2), 1]`.
    pub fn default_v1(n: u64, k: usize) -> Result<Self> {
        let nf = n as f64;
        let alpha = if n < 2 { 0.5 } else { (k as f64 * ln(nf) / nf).min(0.5) };
        Self::geometric(alpha, 1.0 / (2.0 * nf * nf), 1.0)
    }

    /// The grid used by the second algorithm: `alpha = k / n` on `[lbound, ubound]`.
    pub fn default_v2(n: u64, k: usize, lbound: f64, ubound: f64) -> Result<Self> {
        let alpha = (k as f64 / n as f64).min(0.5);
        Self::geometric(alpha, lbound, ubound)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_sorted(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    /// Index of the largest value `<= w`, or 0 when `w` is below the grid.
    /// Requires a sorted grid.
    pub fn floor_index(&self, w: f64) -> usize {
        self.values.partition_point(|&r| r <= w).saturating_sub(1)
    }
}
