//! Exact profile probabilities for small instances.
//!
//! Elements with equal weight are interchangeable, so instead of walking
//! sequences we enumerate how many elements of each weight class receive each
//! observed frequency:
//!
//! `Pr(p, phi) = C_phi * sum_S prod_l [g_l! / ((g_l - |S_l|)! prod_j S_lj!)] * w_l^(sum_j m_j S_lj)`

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::distribution::PseudoDistribution;
use crate::error::{PmlError, Result};
use crate::math::{ln, ln_factorial, log_sum_exp};
use crate::profile::{log_multinomial_coefficient, Profile};

pub const ORACLE_MAX_N: u64 = 16;
pub const ORACLE_MAX_CLASSES: usize = 12;

/// `ln Pr(dist, profile)`; `-inf` when the profile is impossible.
pub fn exact_log_profile_probability(dist: &PseudoDistribution, profile: &Profile) -> Result<f64> {
    let mut classes: BTreeMap<u64, u64> = BTreeMap::new();
    for &w in dist.weights().iter().filter(|&&w| w > 0.0) {
        *classes.entry(w.to_bits()).or_insert(0) += 1;
    }
    let classes: Vec<(f64, u64)> = classes.into_iter().map(|(b, g)| (f64::from_bits(b), g)).collect();
    if profile.n() > ORACLE_MAX_N || classes.len() > ORACLE_MAX_CLASSES {
        return Err(PmlError::TooLarge(format!(
            "oracle scale exceeded (n={}, weight classes={})",
            profile.n(),
            classes.len()
        )));
    }
    let mut terms = Vec::new();
    let mut used = vec![0u64; classes.len()];
    let mut acc = vec![0.0f64; classes.len()];
    let mut denom = vec![0.0f64; classes.len()];
    assign_column(profile, &classes, 0, &mut used, &mut acc, &mut denom, &mut terms);
    if terms.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(log_multinomial_coefficient(profile) + log_sum_exp(terms.iter().copied()))
}

/// Recursion over profile columns; within a column over weight classes.
fn assign_column(
    profile: &Profile,
    classes: &[(f64, u64)],
    j: usize,
    used: &mut [u64],
    acc: &mut [f64],
    denom: &mut [f64],
    terms: &mut Vec<f64>,
) {
    if j == profile.k() {
        let mut t = 0.0;
        for (l, &(_, g)) in classes.iter().enumerate() {
            t += ln_factorial(g) - ln_factorial(g - used[l]) - denom[l] + acc[l];
        }
        terms.push(t);
        return;
    }
    split(profile, classes, j, 0, profile.count(j), used, acc, denom, terms);
}

#[allow(clippy::too_many_arguments)]
fn split(
    profile: &Profile,
    classes: &[(f64, u64)],
    j: usize,
    l: usize,
    left: u64,
    used: &mut [u64],
    acc: &mut [f64],
    denom: &mut [f64],
    terms: &mut Vec<f64>,
) {
    if l == classes.len() {
        if left == 0 {
            assign_column(profile, classes, j + 1, used, acc, denom, terms);
        }
        return;
    }
    let (w, g) = classes[l];
    let room = (g - used[l]).min(left);
    let m = profile.freq(j) as f64;
    for s in 0..=room {
        used[l] += s;
        acc[l] += s as f64 * m * ln(w);
        denom[l] += ln_factorial(s);
        split(profile, classes, j, l + 1, left - s, used, acc, denom, terms);
        used[l] -= s;
        acc[l] -= s as f64 * m * ln(w);
        denom[l] -= ln_factorial(s);
    }
}

/// Every profile of length `n` (one per integer partition of `n`).
pub fn profiles_of_length(n: u64) -> Vec<Profile> {
    let mut out = Vec::new();
    let mut parts = Vec::new();
    partitions(n, n, &mut parts, &mut out);
    out
}

fn partitions(rest: u64, max_part: u64, parts: &mut Vec<u64>, out: &mut Vec<Profile>) {
    if rest == 0 {
        if let Ok(p) = Profile::from_counts(parts.iter().copied()) {
            out.push(p);
        }
        return;
    }
    for part in (1..=max_part.min(rest)).rev() {
        parts.push(part);
        partitions(rest - part, part, parts, out);
        parts.pop();
    }
}
