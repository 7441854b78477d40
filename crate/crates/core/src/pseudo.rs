//! PseudoPML: PML on the elements whose frequency falls in a window, the
//! empirical estimate on the rest.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::approx::{approximate_pml_v2, PmlOptions, PmlResult};
use crate::error::{invalid, Result};
use crate::math::{ceil, floor, ln, sqrt, xlnx};
use crate::profile::PseudoProfile;

/// Inclusive frequency range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyWindow {
    lo: u64,
    hi: u64,
}

impl FrequencyWindow {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo > hi {
            return invalid("window needs lo <= hi");
        }
        Ok(FrequencyWindow { lo, hi })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn contains(&self, f: u64) -> bool {
        self.lo <= f && f <= self.hi
    }
}

impl Default for FrequencyWindow {
    fn default() -> Self {
        FrequencyWindow { lo: 0, hi: 18 }
    }
}

/// Result of picking `S` and tallying its frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Listed elements in `S`, ascending. Elements never seen at all are
    /// not listed; they belong to `S` exactly when `window` contains 0.
    pub subset: Vec<usize>,
    pub pseudo_profile: PseudoProfile,
    /// Frequencies used for estimation, indexed by id.
    pub counts: Vec<u64>,
    /// Ids that occur anywhere in the input.
    pub listed: usize,
    pub window: FrequencyWindow,
}

impl Selection {
    pub fn n(&self) -> u64 {
        self.pseudo_profile.n()
    }

    /// Observed elements outside `S` with their estimation frequency.
    pub fn complement(&self) -> Vec<(usize, u64)> {
        let mut in_s = vec![false; self.counts.len()];
        for &x in &self.subset {
            in_s[x] = true;
        }
        (0..self.counts.len()).filter(|&x| !in_s[x] && self.counts[x] > 0).map(|x| (x, self.counts[x])).collect()
    }
}

fn tally(samples: &[usize], size: usize) -> Vec<u64> {
    let mut counts = vec![0u64; size];
    for &x in samples {
        counts[x] += 1;
    }
    counts
}

fn profile_of(counts: &[u64], subset: &[usize], n: u64) -> Result<PseudoProfile> {
    let mut freq: BTreeMap<u64, u64> = BTreeMap::new();
    for &x in subset {
        if counts[x] > 0 {
            *freq.entry(counts[x]).or_insert(0) += 1;
        }
    }
    PseudoProfile::new(freq.into_iter().collect(), subset.len(), n)
}

/// With `strict`, the first half picks `S` and the second half is tallied;
/// otherwise the same samples do both.
pub fn split_and_select(samples: &[usize], window: FrequencyWindow, strict: bool) -> Result<Selection> {
    if samples.is_empty() {
        return invalid("no samples");
    }
    let size = samples.iter().copied().max().map_or(0, |m| m + 1);
    let (select, estimate) = if strict {
        if samples.len() < 2 || samples.len() % 2 == 1 {
            return invalid("sample splitting needs an even number of samples");
        }
        samples.split_at(samples.len() / 2)
    } else {
        (samples, samples)
    };
    let first = tally(select, size);
    let counts = tally(estimate, size);
    let present: Vec<usize> = (0..size).filter(|&x| first[x] > 0 || counts[x] > 0).collect();
    let subset: Vec<usize> = present.iter().copied().filter(|&x| window.contains(first[x])).collect();
    let pseudo_profile = profile_of(&counts, &subset, estimate.len() as u64)?;
    Ok(Selection { subset, pseudo_profile, counts, listed: present.len(), window })
}

/// PML weights for the elements of `S`, scaled to total mass `n1 / n`.
#[derive(Debug, Clone)]
pub struct SubDistribution {
    pub weights: Vec<f64>,
    /// `n1 / n`.
    pub scale: f64,
    /// Restricted-profile probability bounds actually used.
    pub bounds: (f64, f64),
    pub pml: Option<PmlResult>,
}

impl SubDistribution {
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Runs the second algorithm on the restricted profile and scales by `n1 / n`.
///
/// `[lo, hi]` bounds probabilities under the full distribution. Inside `S`
/// they are divided by `n1 / n`, so the bounds passed on are too.
pub fn pml_on_subset(pp: &PseudoProfile, lo: f64, hi: f64, opts: &PmlOptions) -> Result<SubDistribution> {
    if !(lo > 0.0 && lo <= hi) {
        return invalid("probability interval needs 0 < lo <= hi");
    }
    let profile = match pp.restricted() {
        Some(p) => p,
        None => return Ok(SubDistribution { weights: Vec::new(), scale: 0.0, bounds: (lo, hi), pml: None }),
    };
    let scale = pp.n1() as f64 / pp.n() as f64;
    let ub = (hi / scale).min(1.0);
    let lb = (lo / scale).min(ub);
    let pml = approximate_pml_v2(&profile, lb, ub, opts)?;
    let weights = pml.distribution.weights().iter().map(|w| w * scale).collect();
    Ok(SubDistribution { weights, scale, bounds: (lb, ub), pml: Some(pml) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOptions {
    /// `None` picks the property's default window.
    pub window: Option<FrequencyWindow>,
    pub strict_split: bool,
    /// Constant in the window and interval formulas.
    pub c: f64,
    pub max_levels: Option<usize>,
    pub seed: u64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions { window: None, strict_split: false, c: 1.0, max_levels: Some(DEFAULT_MAX_LEVELS), seed: 0 }
    }
}

/// Level cap for the PML grid inside the estimators.
pub const DEFAULT_MAX_LEVELS: usize = 96;

impl EstimatorOptions {
    fn pml(&self) -> PmlOptions {
        PmlOptions { seed: self.seed, max_levels: self.max_levels, ..PmlOptions::default() }
    }
}

/// `estimate = pml_part + empirical_part + bias_correction`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub estimate: f64,
    pub pml_part: f64,
    pub empirical_part: f64,
    pub bias_correction: f64,
    /// Listed elements in `S`.
    pub subset_size: usize,
    pub n1: u64,
    pub n: u64,
    /// Number of PML weights.
    pub pml_support: usize,
}

/// Plug-in entropy plus the Miller-Madow term `(K - 1) / (2n)`.
pub fn empirical_entropy_with_correction(samples: &[usize]) -> Result<f64> {
    if samples.is_empty() {
        return invalid("no samples");
    }
    let size = samples.iter().copied().max().map_or(0, |m| m + 1);
    let counts = tally(samples, size);
    let n = samples.len() as f64;
    let support = counts.iter().filter(|&&c| c > 0).count() as f64;
    let plug_in = -counts.iter().map(|&c| xlnx(c as f64 / n)).sum::<f64>();
    Ok(plug_in + (support - 1.0) / (2.0 * n))
}

/// `sum_x |p_x - 1/N|` of the empirical distribution, unseen elements included.
pub fn empirical_distance_to_uniformity(samples: &[usize], domain: usize) -> Result<f64> {
    if samples.is_empty() || domain == 0 {
        return invalid("need samples and a positive domain size");
    }
    let size = samples.iter().copied().max().map_or(0, |m| m + 1);
    let counts = tally(samples, size);
    let seen = counts.iter().filter(|&&c| c > 0).count();
    if seen > domain {
        return invalid("more distinct symbols than the domain size");
    }
    let (n, u) = (samples.len() as f64, 1.0 / domain as f64);
    let observed: f64 = counts.iter().filter(|&&c| c > 0).map(|&c| (c as f64 / n - u).abs()).sum();
    Ok(observed + (domain - seen) as f64 * u)
}

pub fn estimate_entropy(samples: &[usize], opts: &EstimatorOptions) -> Result<EstimatorReport> {
    let window = opts.window.unwrap_or_default();
    let sel = split_and_select(samples, window, opts.strict_split)?;
    let n = sel.n() as f64;
    let hi = (2.0 * window.hi().max(1) as f64 / n).min(1.0);
    let lo = (1.0 / (2.0 * n * n)).min(hi);
    let sub = pml_on_subset(&sel.pseudo_profile, lo, hi, &opts.pml())?;
    let pml_part = -sub.weights.iter().map(|&w| xlnx(w)).sum::<f64>();

    let rest = sel.complement();
    let empirical_part = -rest.iter().map(|&(_, c)| xlnx(c as f64 / n)).sum::<f64>();
    let rest_mass: f64 = rest.iter().map(|&(_, c)| c as f64 / n).sum();
    // Per-element Miller-Madow: each plug-in term is low by about (1 - p)/(2n).
    let bias_correction = (rest.len() as f64 - rest_mass) / (2.0 * n);
    Ok(EstimatorReport {
        estimate: pml_part + empirical_part + bias_correction,
        pml_part,
        empirical_part,
        bias_correction,
        subset_size: sel.subset.len(),
        n1: sel.pseudo_profile.n1(),
        n: sel.n(),
        pml_support: sub.weights.len(),
    })
}

/// Frequency window `n/N -+ sqrt(c n ln n / N)`, or `None` when no integer fits.
pub fn uniformity_window(n: u64, domain: usize, c: f64) -> Option<FrequencyWindow> {
    let (nf, big_n) = (n as f64, domain as f64);
    let half = sqrt(c * nf * ln(nf.max(2.0)) / big_n);
    let lo = ceil(nf / big_n - half).max(0.0) as u64;
    let hi = floor(nf / big_n + half);
    if hi < lo as f64 {
        return None;
    }
    Some(FrequencyWindow { lo, hi: hi as u64 })
}

/// Probability interval `1/N -+ sqrt(2c ln n / (n N))`.
pub fn uniformity_interval(n: u64, domain: usize, c: f64) -> (f64, f64) {
    let (nf, big_n) = (n as f64, domain as f64);
    let half = sqrt(2.0 * c * ln(nf.max(2.0)) / (nf * big_n));
    let lo = 1.0 / big_n - half;
    let lo = if lo > 0.0 { lo } else { 1.0 / (2.0 * nf * big_n) };
    (lo, (1.0 / big_n + half).min(1.0))
}

pub fn estimate_distance_to_uniformity(
    samples: &[usize],
    domain: usize,
    opts: &EstimatorOptions,
) -> Result<EstimatorReport> {
    if domain == 0 {
        return invalid("domain size must be positive");
    }
    if samples.is_empty() {
        return invalid("no samples");
    }
    let n_est = if opts.strict_split { samples.len() / 2 } else { samples.len() } as u64;
    let window = match opts.window {
        Some(w) => Some(w),
        None => uniformity_window(n_est.max(1), domain, opts.c),
    };
    // An empty window selects nothing: pick a range no frequency reaches.
    let window = window.unwrap_or(FrequencyWindow { lo: u64::MAX, hi: u64::MAX });
    let sel = split_and_select(samples, window, opts.strict_split)?;
    if sel.listed > domain {
        return invalid("more distinct symbols than the domain size");
    }
    let n = sel.n() as f64;
    let u = 1.0 / domain as f64;
    let unseen = domain - sel.listed;
    let slots = sel.subset.len() + if window.contains(0) { unseen } else { 0 };

    let (lo, hi) = uniformity_interval(sel.n(), domain, opts.c);
    // S has `slots` elements in all, which bounds the PML support.
    let pml_opts = PmlOptions { max_support: Some(slots as u64), ..opts.pml() };
    let sub = pml_on_subset(&sel.pseudo_profile, lo, hi, &pml_opts)?;
    let mut pml_part: f64 = sub.weights.iter().map(|&w| (w - u).abs()).sum();
    pml_part += slots.saturating_sub(sub.weights.len()) as f64 * u;

    let rest = sel.complement();
    let mut empirical_part: f64 = rest.iter().map(|&(_, c)| (c as f64 / n - u).abs()).sum();
    // Listed elements outside S that were not seen in the tallied half.
    let quiet = sel.listed - sel.subset.len() - rest.len();
    empirical_part += quiet as f64 * u;
    if !window.contains(0) {
        empirical_part += unseen as f64 * u;
    }
    Ok(EstimatorReport {
        estimate: pml_part + empirical_part,
        pml_part,
        empirical_part,
        bias_correction: 0.0,
        subset_size: sel.subset.len(),
        n1: sel.pseudo_profile.n1(),
        n: sel.n(),
        pml_support: sub.weights.len(),
    })
}
