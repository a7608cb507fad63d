use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use nusat_core::dist::EnsembleSpec;

/// Non-uniform random 2-SAT: generate, solve, inspect and measure.
///
/// Payloads (DIMACS, JSON, CSV) go to stdout and diagnostics to stderr.
/// Exit codes: 0 success, 10 satisfiable, 20 unsatisfiable (solve only),
/// 2 usage error, 3 runtime error.
#[derive(Debug, Parser)]
#[command(name = "nusat", version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random formula and write it as DIMACS.
    Gen(GenArgs),
    /// Decide a 2-CNF; exits 10 when satisfiable, 20 when not.
    Solve(SolveArgs),
    /// Look for a structural witness of unsatisfiability.
    Witness(WitnessArgs),
    /// Predicted threshold location, regime and sharpness.
    Threshold(ThresholdArgs),
    /// Probability and moment bounds at a given clause count.
    Bounds(BoundsArgs),
    /// Satisfiability probability on a grid of clause counts (CSV).
    Sweep(SweepArgs),
    /// Clause count where the satisfiability probability crosses 1/2.
    Crossing(CrossingArgs),
    /// Relative transition width across a grid of n.
    Sharpness(SharpnessArgs),
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Ensemble: uniform, powerlaw:BETA, geometric:B or file:PATH.
    #[arg(long, value_name = "SPEC", value_parser = parse_spec)]
    pub dist: EnsembleSpec,
    /// Number of variables.
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// Number of clauses.
    #[arg(long)]
    pub m: usize,
    /// Clause width.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum tuple draws per clause before giving up.
    #[arg(long, default_value_t = nusat_core::generator::DEFAULT_RETRY_CAP)]
    pub retry_cap: u64,
    /// Output path; `-` for stdout.
    #[arg(long, short, default_value = "-")]
    pub output: String,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// DIMACS file; `-` for stdin.
    pub input: String,
    /// Exhaustive search instead of the linear-time algorithm (n <= 25).
    #[arg(long)]
    pub brute: bool,
    /// Accept clauses with repeated literals.
    #[arg(long)]
    pub permissive: bool,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// DIMACS file; `-` for stdin.
    pub input: String,
    /// What to look for: bicycle, snake:T or core.
    #[arg(long, value_name = "KIND", value_parser = parse_find)]
    pub find: Find,
    /// Longest bicycle chain to search for.
    #[arg(long, default_value_t = nusat_core::witness::DEFAULT_T_MAX)]
    pub t_max: usize,
    /// Clause width for core search; defaults to the formula's width.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Find {
    Bicycle,
    Snake(usize),
    Core,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub dist: DistArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// Clause count.
    #[arg(long)]
    pub m: f64,
    /// Snake size; defaults to ceil(ln² f(n)).
    #[arg(long)]
    pub t: Option<usize>,
    /// Largest bicycle length in the first-moment sum; defaults to n.
    #[arg(long)]
    pub t_max: Option<usize>,
}

/// Options shared by the experiment subcommands. Each may also come from
/// the JSON file given with `--config`; flags take precedence.
#[derive(Debug, Args)]
pub struct LabArgs {
    /// JSON file with default values for these options.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Ensemble: uniform, powerlaw:BETA, geometric:B or file:PATH.
    #[arg(long, value_name = "SPEC")]
    pub dist: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; overrides the NUSAT_WORKERS environment variable.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub lab: LabArgs,
    #[arg(long)]
    pub n: Option<usize>,
    /// Clause counts as multiples of the predicted threshold, e.g. 0.5,1,1.5.
    #[arg(long, value_delimiter = ',', conflicts_with = "m_list")]
    pub m_grid: Option<Vec<f64>>,
    /// Explicit clause counts, e.g. 100,200,300.
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    /// Trials per grid point.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Confidence level of the Wilson intervals.
    #[arg(long)]
    pub confidence: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CrossingArgs {
    #[command(flatten)]
    pub lab: LabArgs,
    #[arg(long)]
    pub n: Option<usize>,
    /// Total trial budget (at least 1000).
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SharpnessArgs {
    #[command(flatten)]
    pub lab: LabArgs,
    /// Increasing variable counts, e.g. 1000,10000,100000.
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    /// Probe levels delta and 1 - delta, with delta in (0, 0.5].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Trial budget per n (at least 1000).
    #[arg(long)]
    pub budget: Option<u64>,
}

pub fn parse_spec(s: &str) -> Result<EnsembleSpec, String> {
    s.parse::<EnsembleSpec>().map_err(|e| e.to_string())
}

fn parse_find(s: &str) -> Result<Find, String> {
    match s {
        "bicycle" => Ok(Find::Bicycle),
        "core" => Ok(Find::Core),
        _ => match s.strip_prefix("snake:").map(str::parse::<usize>) {
            Some(Ok(t)) if t >= 2 => Ok(Find::Snake(t)),
            _ => Err(format!("`{s}` is not bicycle, core or snake:T with T >= 2")),
        },
    }
}
