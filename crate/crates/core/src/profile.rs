//! Profiles: the multiset of observed frequencies, forgetting labels.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math::ln_factorial;

/// Distinct frequencies `m_j` with multiplicities `phi_j`, sorted by `m_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    entries: Vec<(u64, u64)>,
    n: u64,
}

impl Profile {
    /// Validates ordering and positivity; `n` is recomputed.
    pub fn new(entries: Vec<(u64, u64)>) -> Result<Self> {
        if entries.is_empty() {
            return invalid("empty sample");
        }
        for (idx, &(m, phi)) in entries.iter().enumerate() {
            if m == 0 || phi == 0 {
                return invalid(format!("profile entry ({m},{phi}) must be positive"));
            }
            if idx > 0 && entries[idx - 1].0 >= m {
                return invalid("profile frequencies must be strictly increasing");
            }
        }
        let n = entries.iter().map(|&(m, phi)| m * phi).sum();
        Ok(Profile { entries, n })
    }

    /// From per-element counts; zero counts are ignored.
    pub fn from_counts(counts: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut tally: BTreeMap<u64, u64> = BTreeMap::new();
        for c in counts.into_iter().filter(|&c| c > 0) {
            *tally.entry(c).or_insert(0) += 1;
        }
        Profile::new(tally.into_iter().collect())
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    /// Sample size.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of distinct frequencies.
    pub fn k(&self) -> usize {
        self.entries.len()
    }

    /// Number of distinct observed elements.
    pub fn support(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn freq(&self, j: usize) -> u64 {
        self.entries[j].0
    }

    pub fn count(&self, j: usize) -> u64 {
        self.entries[j].1
    }

    /// Per-element frequencies, expanded and ascending.
    pub fn element_counts(&self) -> Vec<u64> {
        self.entries
            .iter()
            .flat_map(|&(m, phi)| core::iter::repeat(m).take(phi as usize))
            .collect()
    }
}

/// Profile of a sequence of dense ids.
pub fn build_profile(sequence: &[usize]) -> Result<Profile> {
    if sequence.is_empty() {
        return invalid("empty sample");
    }
    Profile::from_counts(counts_of(sequence).into_iter())
}

/// Dense frequency table indexed by id.
pub fn counts_of(sequence: &[usize]) -> Vec<u64> {
    let size = sequence.iter().copied().max().map_or(0, |m| m + 1);
    let mut counts = alloc::vec![0u64; size];
    for &x in sequence {
        counts[x] += 1;
    }
    counts
}

/// `ln(n! / prod_j (m_j!)^{phi_j})`.
pub fn log_multinomial_coefficient(profile: &Profile) -> f64 {
    let mut v = ln_factorial(profile.n());
    for &(m, phi) in profile.entries() {
        v -= phi as f64 * ln_factorial(m);
    }
    v
}

/// The profile of the sub-sequence falling in a subset `S` of the domain.
///
/// `n` is the length of the whole sequence, so `n1 = sum m_j phi_j <= n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoProfile {
    entries: Vec<(u64, u64)>,
    subset_size: usize,
    n: u64,
}

impl PseudoProfile {
    pub fn new(entries: Vec<(u64, u64)>, subset_size: usize, n: u64) -> Result<Self> {
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return invalid("pseudo-profile frequencies must be strictly increasing");
            }
        }
        if entries.iter().any(|&(m, phi)| m == 0 || phi == 0) {
            return invalid("pseudo-profile entries must be positive");
        }
        let seen: u64 = entries.iter().map(|e| e.1).sum();
        if seen > subset_size as u64 {
            return invalid("more observed elements than the subset holds");
        }
        let p = PseudoProfile { entries, subset_size, n };
        if p.n1() > n {
            return invalid("pseudo-profile mass exceeds sequence length");
        }
        Ok(p)
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn subset_size(&self) -> usize {
        self.subset_size
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Samples that landed in `S`.
    pub fn n1(&self) -> u64 {
        self.entries.iter().map(|&(m, phi)| m * phi).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The same entries read as an ordinary profile of length `n1`.
    pub fn restricted(&self) -> Option<Profile> {
        if self.entries.is_empty() {
            None
        } else {
            Profile::new(self.entries.clone()).ok()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_profiles() {
        let p = build_profile(&[0, 1, 0, 2, 2]).unwrap();
        assert_eq!(p.entries(), &[(1, 1), (2, 2)]);
        assert_eq!((p.n(), p.k()), (5, 2));
        let p = build_profile(&[7, 7, 7]).unwrap();
        assert_eq!(p.entries(), &[(3, 1)]);
        assert!(build_profile(&[]).is_err());
    }

    #[test]
    fn multinomial_examples() {
        let lc = |e: Vec<(u64, u64)>| log_multinomial_coefficient(&Profile::new(e).unwrap());
        assert!((lc(vec![(1, 3)]) - 6f64.ln()).abs() < 1e-12);
        assert!((lc(vec![(2, 2)]) - 6f64.ln()).abs() < 1e-12);
        assert!((lc(vec![(1, 2), (3, 1)]) - 20f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(Profile::new(vec![(2, 1), (1, 1)]).is_err());
        assert!(Profile::new(vec![(0, 1)]).is_err());
        assert!(PseudoProfile::new(vec![(3, 2)], 1, 10).is_err());
        assert!(PseudoProfile::new(vec![(3, 2)], 2, 5).is_err());
    }
}
