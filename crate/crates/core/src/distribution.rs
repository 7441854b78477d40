//! Distributions over dense ids, sampling and discretization.

use alloc::format;
use alloc::vec::Vec;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::grid::DiscretizationGrid;

/// Nonnegative weights with total mass at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoDistribution {
    weights: Vec<f64>,
}

impl PseudoDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return invalid("weights must be finite and nonnegative");
        }
        let mass: f64 = weights.iter().sum();
        if mass > 1.0 + 1e-9 {
            return invalid(format!("total mass {mass} exceeds 1"));
        }
        Ok(PseudoDistribution { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// L1 normalization.
    pub fn normalized(&self) -> Result<Distribution> {
        let mass = self.mass();
        if mass <= 0.0 {
            return invalid("cannot normalize a zero pseudo-distribution");
        }
        Distribution::new(self.weights.iter().map(|w| w / mass).collect())
    }
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return invalid("weights must be finite and nonnegative");
        }
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > 1e-9 {
            return invalid(format!("total mass {mass} is not 1"));
        }
        Ok(Distribution { weights })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return invalid("empty domain");
        }
        Distribution::new(alloc::vec![1.0 / size as f64; size])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_pseudo(&self) -> PseudoDistribution {
        PseudoDistribution { weights: self.weights.clone() }
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self.weights.iter().map(|&p| crate::math::xlnx(p)).sum::<f64>()
    }
}

/// `n` i.i.d. draws, reproducible from `seed`.
pub fn sample_sequence(dist: &Distribution, n: usize, seed: u64) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(dist, n, &mut rng)
}

pub fn sample_with<R: rand::Rng>(dist: &Distribution, n: usize, rng: &mut R) -> Result<Vec<usize>> {
    if n == 0 {
        return invalid("sample size must be positive");
    }
    let table = WeightedIndex::new(dist.weights()).map_err(|e| {
        crate::error::PmlError::Invalid(format!("cannot sample: {e}"))
    })?;
    Ok((0..n).map(|_| table.sample(rng)).collect())
}

/// Floors every nonzero weight to the grid; weights under the smallest value
/// are raised to it.
pub fn discretize_distribution(dist: &Distribution, grid: &DiscretizationGrid) -> Result<PseudoDistribution> {
    if !grid.is_sorted() {
        return invalid("discretization needs a sorted grid");
    }
    let weights: Vec<f64> = dist
        .weights()
        .iter()
        .map(|&w| if w > 0.0 { grid.values()[grid.floor_index(w)] } else { 0.0 })
        .collect();
    PseudoDistribution::new(weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let d = Distribution::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(sample_sequence(&d, 50, 9).unwrap(), sample_sequence(&d, 50, 9).unwrap());
        let point = Distribution::new(vec![1.0]).unwrap();
        assert_eq!(sample_sequence(&point, 3, 1).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn uniform_sample_frequencies() {
        let d = Distribution::uniform(2).unwrap();
        let n = 100_000;
        let s = sample_sequence(&d, n, 4).unwrap();
        let ones = s.iter().filter(|&&x| x == 1).count() as f64;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((ones - n as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn discretize_floors() {
        let g = DiscretizationGrid::from_levels(vec![0.25, 0.5, 1.0]).unwrap();
        let d = Distribution::new(vec![0.7, 0.3]).unwrap();
        assert_eq!(discretize_distribution(&d, &g).unwrap().weights(), &[0.5, 0.25]);
        let d = Distribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert_eq!(discretize_distribution(&d, &g).unwrap().weights(), d.weights());
    }
}
