//! Monte Carlo harness: satisfiability-probability curves, threshold
//! location by bisection, and transition-width probes.
//!
//! Every trial draws its formula from a seed derived from the experiment
//! key and the trial index, so results are identical for any number of
//! workers. Trials whose generator hits the retry cap are re-drawn with a
//! bumped sub-seed and counted.

mod crossing;
mod sweep;
mod wilson;

pub use crossing::{
    CrossingEstimate, LevelPoint, SharpnessPoint, SharpnessReport, Verdict, DEFAULT_DELTA,
    MIN_BUDGET,
};
pub use sweep::{MGrid, SweepConfig, SweepOutput, SweepRecord, SWEEP_CSV_HEADER};
pub use wilson::{wilson_interval, z_value};

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::dist::DistError;
use crate::formula::Formula;
use crate::generator::{ClauseSampler, GenError, GeneratorConfig, DEFAULT_RETRY_CAP};
use crate::rng::derive;
use crate::solver::{SolveError, TwoSatSolver};

/// Environment variable that overrides the default worker count.
pub const WORKERS_ENV: &str = "NUSAT_WORKERS";

/// Default confidence level for every reported interval.
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Re-draws allowed per trial before the trial is declared failed.
pub const MAX_REDRAWS_PER_TRIAL: u64 = 64;

/// Clause width used by the harness; the solver is 2-SAT only.
const K: usize = 2;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(
        "p_hat does not cross {target} inside [{m_lo}, {m_hi}]: p_hat({m_lo}) = {p_lo:.4}, p_hat({m_hi}) = {p_hi:.4}"
    )]
    Bracket { n: usize, target: f64, m_lo: usize, p_lo: f64, m_hi: usize, p_hi: f64 },
    #[error("trial {trial} at m = {m} hit the retry cap on {redraws} consecutive re-draws")]
    RedrawsExhausted { m: usize, trial: u64, redraws: u64 },
    #[error("cannot build worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error(transparent)]
    Solver(#[from] SolveError),
}

/// Satisfiable count over a batch of trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub sat: u64,
    pub redraws: u64,
}

impl Tally {
    pub fn p_hat(&self) -> f64 {
        self.sat as f64 / self.trials as f64
    }

    fn merge(self, other: Tally) -> Tally {
        Tally {
            trials: self.trials + other.trials,
            sat: self.sat + other.sat,
            redraws: self.redraws + other.redraws,
        }
    }
}

/// A worker pool plus the generator settings shared by all experiments.
#[derive(Debug)]
pub struct Lab {
    pool: rayon::ThreadPool,
    workers: usize,
    retry_cap: u64,
}

impl Lab {
    pub fn new(workers: usize) -> Result<Self, LabError> {
        if workers == 0 {
            return Err(LabError::Config("worker count must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| LabError::Pool(e.to_string()))?;
        Ok(Lab { pool, workers, retry_cap: DEFAULT_RETRY_CAP })
    }

    /// Worker count from [`WORKERS_ENV`] if set, else available parallelism.
    pub fn from_env() -> Result<Self, LabError> {
        let workers = match std::env::var(WORKERS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| LabError::Config(format!("{WORKERS_ENV}={v:?} is not a count")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Lab::new(workers)
    }

    pub fn with_retry_cap(mut self, retry_cap: u64) -> Self {
        self.retry_cap = retry_cap.max(1);
        self
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Runs `trials` independent formulas with `m` clauses. Trial `i` uses
    /// generator seed `derive([key, i, bump])`, `bump` counting re-draws.
    pub fn evaluate(&self, sampler: &ClauseSampler, m: usize, trials: u64, key: u64) -> Result<Tally, LabError> {
        let n = sampler.n();
        let retry_cap = self.retry_cap;
        self.pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map_init(
                    || (Formula::with_arity(n, K), TwoSatSolver::new()),
                    |(f, solver), trial| -> Result<Tally, LabError> {
                        for bump in 0..=MAX_REDRAWS_PER_TRIAL {
                            let cfg = GeneratorConfig { seed: derive(&[key, trial, bump]), retry_cap };
                            match sampler.sample_into(m, &cfg, f) {
                                Ok(()) => {
                                    let sat = solver.is_satisfiable(f)?;
                                    return Ok(Tally { trials: 1, sat: sat as u64, redraws: bump });
                                }
                                Err(GenError::RetryCapExceeded { .. }) => continue,
                                Err(e) => return Err(e.into()),
                            }
                        }
                        Err(LabError::RedrawsExhausted { m, trial, redraws: MAX_REDRAWS_PER_TRIAL + 1 })
                    },
                )
                .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
        })
    }
}

fn sampler_for(d: &crate::dist::Distribution) -> Result<ClauseSampler, LabError> {
    Ok(ClauseSampler::new(d, K)?)
}

/// [`Lab::run_sweep`] on a pool sized by [`Lab::from_env`].
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput, LabError> {
    Lab::from_env()?.run_sweep(cfg)
}

/// [`Lab::estimate_crossing`] on a pool sized by [`Lab::from_env`].
pub fn estimate_crossing(
    spec: &crate::dist::EnsembleSpec,
    n: usize,
    seed: u64,
    budget: u64,
) -> Result<CrossingEstimate, LabError> {
    Lab::from_env()?.estimate_crossing(spec, n, seed, budget)
}

/// [`Lab::sharpness_probe`] on a pool sized by [`Lab::from_env`].
pub fn sharpness_probe(
    spec: &crate::dist::EnsembleSpec,
    n_grid: &[usize],
    delta: f64,
    budget: u64,
    seed: u64,
) -> Result<SharpnessReport, LabError> {
    Lab::from_env()?.sharpness_probe(spec, n_grid, delta, budget, seed)
}
