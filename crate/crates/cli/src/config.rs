//! Experiment settings merged from an optional JSON file and flags.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

use nusat_core::dist::EnsembleSpec;
use nusat_core::xlab::{Lab, MGrid, DEFAULT_CONFIDENCE, DEFAULT_DELTA};

use crate::cli::{parse_spec, CrossingArgs, LabArgs, SharpnessArgs, SweepArgs};
use crate::Usage;

pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_BUDGET: u64 = 20_000;

/// Keys accepted in a `--config` file; each mirrors the flag of the same
/// name with dashes replaced by underscores.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dist: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub m_grid: Option<Vec<f64>>,
    pub m_list: Option<Vec<usize>>,
    pub trials: Option<u64>,
    pub confidence: Option<f64>,
    pub budget: Option<u64>,
    pub n_grid: Option<Vec<usize>>,
    pub delta: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

pub struct Common {
    pub spec: EnsembleSpec,
    pub seed: u64,
    pub lab: Lab,
}

fn common(args: &LabArgs, file: &FileConfig) -> Result<Common> {
    let dist = require(args.dist.as_deref().or(file.dist.as_deref()), "dist")?;
    let spec = parse_spec(dist).map_err(|e| Usage(format!("--dist {dist}: {e}")))?;
    let lab = match args.workers.or(file.workers) {
        Some(w) => Lab::new(w)?,
        None => Lab::from_env()?,
    };
    Ok(Common { spec, seed: args.seed.or(file.seed).unwrap_or(0), lab })
}

fn require<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| {
        Usage(format!("missing --{name} (or `{}` in the config file)", name.replace('-', "_"))).into()
    })
}

pub struct Sweep {
    pub common: Common,
    pub n: usize,
    pub grid: MGrid,
    pub trials: u64,
    pub confidence: f64,
}

pub fn sweep(args: SweepArgs) -> Result<Sweep> {
    let file = FileConfig::load(args.lab.config.as_deref())?;
    let common = common(&args.lab, &file)?;
    let grid = match (args.m_grid, args.m_list) {
        (Some(g), _) => MGrid::Relative(g),
        (None, Some(l)) => MGrid::Explicit(l),
        (None, None) => match (file.m_grid, file.m_list) {
            (Some(_), Some(_)) => return Err(Usage("config file sets both m_grid and m_list".into()).into()),
            (Some(g), None) => MGrid::Relative(g),
            (None, Some(l)) => MGrid::Explicit(l),
            (None, None) => return Err(Usage("missing --m-grid or --m-list".into()).into()),
        },
    };
    Ok(Sweep {
        common,
        n: require(args.n.or(file.n), "n")?,
        grid,
        trials: args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
        confidence: args.confidence.or(file.confidence).unwrap_or(DEFAULT_CONFIDENCE),
    })
}

pub struct Crossing {
    pub common: Common,
    pub n: usize,
    pub budget: u64,
}

pub fn crossing(args: CrossingArgs) -> Result<Crossing> {
    let file = FileConfig::load(args.lab.config.as_deref())?;
    Ok(Crossing {
        common: common(&args.lab, &file)?,
        n: require(args.n.or(file.n), "n")?,
        budget: args.budget.or(file.budget).unwrap_or(DEFAULT_BUDGET),
    })
}

pub struct Sharpness {
    pub common: Common,
    pub n_grid: Vec<usize>,
    pub delta: f64,
    pub budget: u64,
}

pub fn sharpness(args: SharpnessArgs) -> Result<Sharpness> {
    let file = FileConfig::load(args.lab.config.as_deref())?;
    Ok(Sharpness {
        common: common(&args.lab, &file)?,
        n_grid: require(args.n_grid.or(file.n_grid), "n-grid")?,
        delta: args.delta.or(file.delta).unwrap_or(DEFAULT_DELTA),
        budget: args.budget.or(file.budget).unwrap_or(DEFAULT_BUDGET),
    })
}
