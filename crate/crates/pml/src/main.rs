use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pml::bench::{self, BenchConfig, Estimator, Property};
use pml::error::{Error, Result};
use pml::io;
use pml_core::approx::{approximate_pml_v1, approximate_pml_v2, PmlOptions};
use pml_core::profile::build_profile;
use pml_core::pseudo::{estimate_distance_to_uniformity, estimate_entropy, EstimatorOptions, FrequencyWindow};
use pml_core::rounding::matrix_round_seeded;

#[derive(Parser)]
#[command(name = "pml", version, about = "Approximate profile maximum likelihood and PseudoPML estimators")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Defaults to csv for `bench` and json elsewhere.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    V1,
    V2,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Entropy,
    Uniformity,
}

#[derive(Subcommand)]
enum Cmd {
    /// Profile of a sample file.
    Profile { samples: PathBuf },
    /// Approximate PML distribution for a profile JSON file.
    ApproxPml {
        profile: PathBuf,
        #[arg(long, value_enum, default_value = "v1")]
        algo: Algo,
        /// v2 only; defaults to 1/(2n^2).
        #[arg(long)]
        lbound: Option<f64>,
        /// v2 only; defaults to 1.
        #[arg(long)]
        ubound: Option<f64>,
        /// Solver trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        max_levels: Option<usize>,
    },
    /// Round a matrix CSV; prints the certificate as JSON.
    RoundMatrix { input: PathBuf },
    /// PseudoPML estimate of a property from a sample file.
    Estimate {
        #[arg(value_enum)]
        property: PropertyArg,
        samples: PathBuf,
        /// Domain size; required for uniformity.
        #[arg(long = "N")]
        domain: Option<usize>,
        /// Entropy window upper end.
        #[arg(long, default_value_t = 18)]
        threshold: u64,
        /// Select with the first half of the samples, estimate with the second.
        #[arg(long)]
        strict_split: bool,
        #[arg(long, default_value_t = pml_core::pseudo::DEFAULT_MAX_LEVELS)]
        max_levels: usize,
    },
    /// RMSE table over synthetic trials.
    Bench {
        /// uniform, mix2 or zipf.
        #[arg(long, default_value = "zipf")]
        dist: String,
        /// Zipf exponent.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long = "N", default_value_t = 1000)]
        domain: usize,
        /// Comma-separated sample sizes.
        #[arg(long, value_delimiter = ',', default_values_t = [300, 1000, 3000])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, value_enum, default_value = "entropy")]
        property: PropertyArg,
        /// Comma-separated: pseudo_pml, mle, truth.
        #[arg(long, value_delimiter = ',', default_value = "pseudo_pml,mle")]
        estimators: Vec<String>,
        /// Fill the runtime_ms column (makes output run-dependent).
        #[arg(long)]
        timing: bool,
        #[arg(long, default_value_t = pml_core::pseudo::DEFAULT_MAX_LEVELS)]
        max_levels: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = v.to_string();
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<()> {
    let out = cli.out.as_deref();
    let format = |default| cli.format.unwrap_or(default);
    match cli.cmd {
        Cmd::Profile { samples } => {
            let (seq, _) = io::parse_samples(&read(&samples)?)?;
            let p = build_profile(&seq)?;
            let text = match format(Format::Json) {
                Format::Json => json_text(&io::profile_to_json(&p)),
                Format::Csv => io::profile_to_csv(&p),
            };
            emit(out, &text)
        }
        Cmd::ApproxPml { profile, algo, lbound, ubound, trace, max_levels } => {
            let p = io::profile_from_json(&read(&profile)?)?;
            let mut opts = PmlOptions { seed: cli.seed, max_levels, ..PmlOptions::default() };
            opts.solver.keep_trace = trace.is_some();
            let result = match algo {
                Algo::V1 => {
                    if lbound.is_some() || ubound.is_some() {
                        return Err(Error::Parse("--lbound/--ubound only apply to --algo v2".into()));
                    }
                    approximate_pml_v1(&p, &opts)?
                }
                Algo::V2 => {
                    let n = p.n() as f64;
                    let lo = lbound.unwrap_or(1.0 / (2.0 * n * n));
                    approximate_pml_v2(&p, lo, ubound.unwrap_or(1.0), &opts)?
                }
            };
            if let Some(t) = trace {
                fs::write(t, io::trace_to_jsonl(&result.trace.relaxation.trace))?;
            }
            let w = result.distribution.weights();
            let text = match format(Format::Json) {
                Format::Json => json_text(&io::weights_to_json(w)),
                Format::Csv => io::weights_to_csv(w),
            };
            emit(out, &text)
        }
        Cmd::RoundMatrix { input } => {
            let a = io::matrix_from_csv(&read(&input)?)?;
            let r = matrix_round_seeded(&a, cli.seed)?;
            if let Some(p) = out {
                fs::write(p, io::matrix_to_csv(&r.rounded))?;
            }
            emit(None, &json_text(&io::certificate_to_json(&r, &a)))
        }
        Cmd::Estimate { property, samples, domain, threshold, strict_split, max_levels } => {
            let (seq, tok) = io::parse_samples(&read(&samples)?)?;
            let mut opts = EstimatorOptions {
                strict_split,
                seed: cli.seed,
                max_levels: Some(max_levels),
                ..EstimatorOptions::default()
            };
            let report = match property {
                PropertyArg::Entropy => {
                    opts.window = Some(FrequencyWindow::new(0, threshold)?);
                    estimate_entropy(&seq, &opts)?
                }
                PropertyArg::Uniformity => {
                    let Some(domain) = domain else {
                        return Err(Error::Parse("uniformity needs --N".into()));
                    };
                    if domain < tok.len() {
                        return Err(Error::Parse(format!("--N {domain} is below the {} distinct tokens", tok.len())));
                    }
                    estimate_distance_to_uniformity(&seq, domain, &opts)?
                }
            };
            let text = match format(Format::Json) {
                Format::Json => json_text(&io::report_to_json(&report)),
                Format::Csv => io::report_to_csv(&report),
            };
            emit(out, &text)
        }
        Cmd::Bench { dist, alpha, domain, n, trials, property, estimators, timing, max_levels } => {
            let estimators = estimators.iter().map(|s| s.parse::<Estimator>()).collect::<Result<Vec<_>>>()?;
            let cfg = BenchConfig {
                kind: bench::parse_kind(&dist, alpha)?,
                domain,
                sample_sizes: n,
                trials,
                estimators,
                property: match property {
                    PropertyArg::Entropy => Property::Entropy,
                    PropertyArg::Uniformity => Property::Uniformity,
                },
                seed: cli.seed,
                timing,
                estimator_options: EstimatorOptions { max_levels: Some(max_levels), ..EstimatorOptions::default() },
            };
            let rows = bench::run_trials(&cfg)?;
            let text = match format(Format::Csv) {
                Format::Csv => bench::rows_to_csv(&rows),
                Format::Json => json_text(&bench::rows_to_json(&rows)),
            };
            emit(out, &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pml: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
