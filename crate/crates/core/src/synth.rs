//! Synthetic distributions for benchmarks.

use alloc::vec::Vec;

use crate::distribution::Distribution;
use crate::error::{invalid, Result};
use crate::math::pow;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionKind {
    Uniform,
    /// Half the mass on the first `N/10` elements, half on the rest.
    Mix2,
    /// `p_i ~ i^-alpha`.
    Zipf(f64),
}

pub fn make_distribution(kind: DistributionKind, size: usize) -> Result<Distribution> {
    if size == 0 {
        return invalid("domain size must be positive");
    }
    let raw: Vec<f64> = match kind {
        DistributionKind::Uniform => alloc::vec![1.0; size],
        DistributionKind::Mix2 => {
            if size < 10 {
                return invalid("mix2 needs N >= 10");
            }
            let head = size / 10;
            let (a, b) = (0.5 / head as f64, 0.5 / (size - head) as f64);
            (0..size).map(|i| if i < head { a } else { b }).collect()
        }
        DistributionKind::Zipf(alpha) => {
            if !alpha.is_finite() || alpha < 0.0 {
                return invalid("zipf exponent must be finite and nonnegative");
            }
            (1..=size).map(|i| pow(i as f64, -alpha)).collect()
        }
    };
    let total: f64 = raw.iter().sum();
    Distribution::new(raw.into_iter().map(|w| w / total).collect())
}

/// `sum_x |p_x - 1/N|` over the distribution's own domain.
pub fn distance_to_uniformity(dist: &Distribution) -> f64 {
    let u = 1.0 / dist.len() as f64;
    dist.weights().iter().map(|p| (p - u).abs()).sum()
}
