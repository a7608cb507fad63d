//! Fixed-grid satisfiability-probability sweeps.

use std::io::Write;

use serde::Serialize;

use super::{sampler_for, wilson_interval, Lab, LabError, DEFAULT_CONFIDENCE};
use crate::analysis::predict_threshold;
use crate::dist::{instantiate, EnsembleSpec};
use crate::rng::derive;

pub const SWEEP_CSV_HEADER: &str = "n,m,trials,sat_count,p_hat,ci_low,ci_high,seed";

/// Clause counts to visit.
#[derive(Debug, Clone, PartialEq)]
pub enum MGrid {
    /// Multiples of the predicted threshold, rounded to the nearest
    /// integer (at least 1).
    Relative(Vec<f64>),
    Explicit(Vec<usize>),
}

impl MGrid {
    pub fn resolve(&self, m_star: f64) -> Vec<usize> {
        match self {
            MGrid::Relative(factors) => {
                factors.iter().map(|c| ((c * m_star).round() as usize).max(1)).collect()
            }
            MGrid::Explicit(ms) => ms.clone(),
        }
    }

    fn validate(&self) -> Result<(), LabError> {
        let ok = match self {
            MGrid::Relative(f) => !f.is_empty() && f.iter().all(|c| c.is_finite() && *c > 0.0),
            MGrid::Explicit(m) => !m.is_empty() && m.iter().all(|&m| m > 0),
        };
        if ok {
            Ok(())
        } else {
            Err(LabError::Config("m grid must be non-empty and positive".into()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub spec: EnsembleSpec,
    pub n: usize,
    pub m_grid: MGrid,
    pub trials: u64,
    pub seed: u64,
    pub confidence: f64,
}

impl SweepConfig {
    pub fn new(spec: EnsembleSpec, n: usize, m_grid: MGrid, trials: u64, seed: u64) -> Self {
        SweepConfig { spec, n, m_grid, trials, seed, confidence: DEFAULT_CONFIDENCE }
    }

    pub fn validate(&self) -> Result<(), LabError> {
        if self.trials == 0 {
            return Err(LabError::Config("trials must be at least 1".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(LabError::Config(format!("confidence {} is not in (0, 1)", self.confidence)));
        }
        self.m_grid.validate()?;
        self.spec.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub n: usize,
    pub m: usize,
    pub trials: u64,
    pub sat_count: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Key from which this point's trial seeds are derived.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    /// Trials re-drawn after a generator retry-cap failure.
    pub redraws: u64,
}

impl SweepOutput {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl Lab {
    pub fn run_sweep(&self, cfg: &SweepConfig) -> Result<SweepOutput, LabError> {
        cfg.validate()?;
        let d = instantiate(&cfg.spec, cfg.n)?;
        let sampler = sampler_for(&d)?;
        let ms = cfg.m_grid.resolve(predict_threshold(&d).m_star);
        let mut records = Vec::with_capacity(ms.len());
        let mut redraws = 0;
        for m in ms {
            let key = derive(&[cfg.seed, cfg.n as u64, m as u64]);
            let t = self.evaluate(&sampler, m, cfg.trials, key)?;
            redraws += t.redraws;
            let (ci_low, ci_high) = wilson_interval(t.sat, t.trials, cfg.confidence);
            records.push(SweepRecord {
                n: cfg.n,
                m,
                trials: t.trials,
                sat_count: t.sat,
                p_hat: t.p_hat(),
                ci_low,
                ci_high,
                seed: key,
            });
        }
        Ok(SweepOutput { records, redraws })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let cfg = SweepConfig::new(EnsembleSpec::Uniform, 40, MGrid::Explicit(vec![10, 60]), 5, 1);
        let out = Lab::new(1).unwrap().run_sweep(&cfg).unwrap();
        let mut buf = Vec::new();
        out.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SWEEP_CSV_HEADER));
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn relative_grid_anchors_on_threshold() {
        let g = MGrid::Relative(vec![0.5, 1.0, 1.5]);
        assert_eq!(g.resolve(500.0), vec![250, 500, 750]);
        assert_eq!(MGrid::Relative(vec![1e-9]).resolve(10.0), vec![1]);
    }

    #[test]
    fn single_trial_points() {
        let cfg = SweepConfig::new(EnsembleSpec::Uniform, 30, MGrid::Relative(vec![1.0]), 1, 3);
        let r = &Lab::new(1).unwrap().run_sweep(&cfg).unwrap().records[0];
        assert!(r.sat_count <= 1);
        assert_eq!((r.ci_low, r.ci_high), wilson_interval(r.sat_count, 1, 0.95));
    }

    #[test]
    fn rejects_bad_configs() {
        let lab = Lab::new(1).unwrap();
        let mut cfg = SweepConfig::new(EnsembleSpec::Uniform, 30, MGrid::Explicit(vec![]), 1, 3);
        assert!(matches!(lab.run_sweep(&cfg), Err(LabError::Config(_))));
        cfg.m_grid = MGrid::Explicit(vec![0]);
        assert!(lab.run_sweep(&cfg).is_err());
        cfg.m_grid = MGrid::Explicit(vec![3]);
        cfg.trials = 0;
        assert!(lab.run_sweep(&cfg).is_err());
    }
}
