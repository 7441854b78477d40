//! Trial harness: sample from a synthetic distribution, run estimators,
//! report RMSE against the exact property value.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use pml_core::distribution::sample_sequence;
use pml_core::pseudo::{
    empirical_distance_to_uniformity, empirical_entropy_with_correction, estimate_distance_to_uniformity,
    estimate_entropy, EstimatorOptions,
};
use pml_core::synth::{distance_to_uniformity, make_distribution, DistributionKind};
use pml_core::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{parse_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Entropy,
    Uniformity,
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(Property::Entropy),
            "uniformity" => Ok(Property::Uniformity),
            _ => parse_err(format!("unknown property {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    PseudoPml,
    /// Entropy: plug-in plus Miller-Madow. Uniformity: plug-in distance.
    Empirical,
    /// Returns the true value; a harness sanity check.
    Truth,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::PseudoPml => "pseudo_pml",
            Estimator::Empirical => "mle",
            Estimator::Truth => "truth",
        }
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pseudo_pml" | "pml" => Ok(Estimator::PseudoPml),
            "mle" | "empirical" => Ok(Estimator::Empirical),
            "truth" => Ok(Estimator::Truth),
            _ => parse_err(format!("unknown estimator {s:?}")),
        }
    }
}

pub fn parse_kind(name: &str, alpha: f64) -> Result<DistributionKind> {
    match name {
        "uniform" => Ok(DistributionKind::Uniform),
        "mix2" => Ok(DistributionKind::Mix2),
        "zipf" => Ok(DistributionKind::Zipf(alpha)),
        _ => parse_err(format!("unknown distribution {name:?}")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub kind: DistributionKind,
    pub domain: usize,
    pub sample_sizes: Vec<usize>,
    pub trials: usize,
    pub estimators: Vec<Estimator>,
    pub property: Property,
    pub seed: u64,
    /// Fill in `runtime_ms`. Off by default so output is reproducible.
    pub timing: bool,
    pub estimator_options: EstimatorOptions,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            kind: DistributionKind::Zipf(1.0),
            domain: 1000,
            sample_sizes: vec![300, 1000, 3000],
            trials: 20,
            estimators: vec![Estimator::PseudoPml, Estimator::Empirical],
            property: Property::Entropy,
            seed: 0,
            timing: false,
            estimator_options: EstimatorOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub estimator: Estimator,
    pub n: usize,
    pub rmse: f64,
    pub mean_abs_err: f64,
    /// Mean wall time per trial.
    pub runtime_ms: Option<f64>,
}

pub fn true_value(dist: &Distribution, property: Property) -> f64 {
    match property {
        Property::Entropy => dist.entropy(),
        Property::Uniformity => distance_to_uniformity(dist),
    }
}

/// Seed for trial `t` at sample size index `i`, independent of thread
/// scheduling.
pub fn trial_seed(seed: u64, i: usize, t: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((i as u64) << 32) | t as u64);
    rng.gen()
}

fn estimate(
    est: Estimator,
    cfg: &BenchConfig,
    samples: &[usize],
    truth: f64,
    seed: u64,
) -> Result<f64> {
    let opts = EstimatorOptions { seed, ..cfg.estimator_options };
    Ok(match (est, cfg.property) {
        (Estimator::Truth, _) => truth,
        (Estimator::PseudoPml, Property::Entropy) => estimate_entropy(samples, &opts)?.estimate,
        (Estimator::PseudoPml, Property::Uniformity) => {
            estimate_distance_to_uniformity(samples, cfg.domain, &opts)?.estimate
        }
        (Estimator::Empirical, Property::Entropy) => empirical_entropy_with_correction(samples)?,
        (Estimator::Empirical, Property::Uniformity) => empirical_distance_to_uniformity(samples, cfg.domain)?,
    })
}

/// One row per (estimator, n), estimators varying fastest.
pub fn run_trials(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.trials == 0 {
        return parse_err("trials must be at least 1");
    }
    if cfg.sample_sizes.iter().any(|&n| n == 0) {
        return parse_err("sample sizes must be positive");
    }
    let dist = make_distribution(cfg.kind, cfg.domain)?;
    let truth = true_value(&dist, cfg.property);
    let mut rows = Vec::new();
    for (i, &n) in cfg.sample_sizes.iter().enumerate() {
        // (estimate, seconds) per trial per estimator, in trial order.
        let per_trial: Vec<Result<Vec<(f64, f64)>>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg.seed, i, t);
                let samples = sample_sequence(&dist, n, seed)?;
                cfg.estimators
                    .iter()
                    .map(|&e| {
                        let start = Instant::now();
                        let v = estimate(e, cfg, &samples, truth, seed)?;
                        Ok((v, start.elapsed().as_secs_f64()))
                    })
                    .collect()
            })
            .collect();
        let per_trial = per_trial.into_iter().collect::<Result<Vec<_>>>()?;
        for (e_idx, &est) in cfg.estimators.iter().enumerate() {
            let errs: Vec<f64> = per_trial.iter().map(|r| r[e_idx].0 - truth).collect();
            let m = errs.len() as f64;
            let rmse = (errs.iter().map(|e| e * e).sum::<f64>() / m).sqrt();
            let mean_abs_err = errs.iter().map(|e| e.abs()).sum::<f64>() / m;
            let runtime_ms = cfg
                .timing
                .then(|| per_trial.iter().map(|r| r[e_idx].1).sum::<f64>() * 1000.0 / m);
            rows.push(BenchRow { estimator: est, n, rmse, mean_abs_err, runtime_ms });
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("estimator,n,rmse,mean_abs_err,runtime_ms\n");
    for r in rows {
        let rt = r.runtime_ms.map(|x| format!("{x:.3}")).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", r.estimator.name(), r.n, r.rmse, r.mean_abs_err, rt).unwrap();
    }
    out
}

pub fn rows_to_json(rows: &[BenchRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "estimator": r.estimator.name(),
                    "n": r.n,
                    "rmse": r.rmse,
                    "mean_abs_err": r.mean_abs_err,
                    "runtime_ms": r.runtime_ms,
                })
            })
            .collect(),
    )
}
