//! Threshold location by bisection and transition-width probes.
//!
//! A level search looks for the clause count where `Pr(sat)` equals a
//! target. It evaluates both ends of `[m*/8, 8 m*]`, then bisects in
//! `log m` for up to [`STEPS`] steps. Trial counts follow a fixed schedule
//! derived from the budget, growing linearly with the step so later steps,
//! which sit closer to the target, get more trials. A final ladder of
//! points at `m_hat·(1 ± s)` walks outwards on each side until an interval
//! excludes the target; those flanks bound the estimate.

use serde::Serialize;

use super::{sampler_for, wilson_interval, Lab, LabError, DEFAULT_CONFIDENCE};
use crate::analysis::predict_threshold;
use crate::dist::{instantiate, EnsembleSpec};
use crate::generator::ClauseSampler;
use crate::rng::derive;

/// Smallest accepted trial budget for one search.
pub const MIN_BUDGET: u64 = 1000;

/// Default distance of the probe levels from 0 and 1.
pub const DEFAULT_DELTA: f64 = 0.1;

const BRACKET_FACTOR: f64 = 8.0;
const STEPS: u64 = 20;
const MIN_END_TRIALS: u64 = 16;
const LADDER: [f64; 6] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.4];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelPoint {
    pub m: usize,
    pub trials: u64,
    pub sat_count: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingEstimate {
    pub n: usize,
    /// Target satisfiability probability; ½ for the threshold itself.
    pub target: f64,
    pub m_star: f64,
    pub m_hat: f64,
    /// `[low, high]`: the largest evaluated `m <= m_hat` whose interval lies
    /// above the target and the smallest `m >= m_hat` whose interval lies
    /// below it, falling back to the bracket ends.
    pub ci: [f64; 2],
    pub bracket: [usize; 2],
    pub trials_used: u64,
    pub redraws: u64,
    pub points: Vec<LevelPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Widths decrease and the first and last intervals are disjoint;
    /// consistent with a sharp threshold.
    Shrinking,
    /// Adjacent width intervals overlap; consistent with a coarse threshold.
    Stable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessPoint {
    pub n: usize,
    /// `(m_δ - m_{1-δ}) / m_hat`.
    pub w: f64,
    pub w_ci: [f64; 2],
    pub crossing: CrossingEstimate,
    /// Where `Pr(sat) = 1 - δ` (the smaller clause count).
    pub upper_level: CrossingEstimate,
    /// Where `Pr(sat) = δ` (the larger clause count).
    pub lower_level: CrossingEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub delta: f64,
    pub points: Vec<SharpnessPoint>,
    pub verdict: Verdict,
    pub note: String,
}

impl Lab {
    /// Clause count where `Pr(sat) = ½`, searched in `[m*/8, 8 m*]`.
    pub fn estimate_crossing(
        &self,
        spec: &EnsembleSpec,
        n: usize,
        seed: u64,
        budget: u64,
    ) -> Result<CrossingEstimate, LabError> {
        check_budget(budget)?;
        let d = instantiate(spec, n)?;
        let sampler = sampler_for(&d)?;
        let m_star = predict_threshold(&d).m_star;
        self.locate(&sampler, m_star, 0.5, seed, budget)
    }

    /// Relative transition width at each `n`. The per-`n` budget is split
    /// evenly over the three level searches (one search when `δ = ½`).
    pub fn sharpness_probe(
        &self,
        spec: &EnsembleSpec,
        n_grid: &[usize],
        delta: f64,
        budget: u64,
        seed: u64,
    ) -> Result<SharpnessReport, LabError> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(LabError::Config(format!("delta {delta} is not in (0, 0.5]")));
        }
        if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::Config("n grid must be non-empty and increasing".into()));
        }
        check_budget(budget)?;
        let mut points = Vec::with_capacity(n_grid.len());
        for &n in n_grid {
            let d = instantiate(spec, n)?;
            let sampler = sampler_for(&d)?;
            let m_star = predict_threshold(&d).m_star;
            let point = if delta == 0.5 {
                let c = self.locate(&sampler, m_star, 0.5, seed, budget)?;
                width(c.clone(), c.clone(), c)
            } else {
                let share = budget / 3;
                let crossing = self.locate(&sampler, m_star, 0.5, seed, share)?;
                let upper = self.locate(&sampler, m_star, 1.0 - delta, seed, share)?;
                let lower = self.locate(&sampler, m_star, delta, seed, share)?;
                width(crossing, upper, lower)
            };
            points.push(point);
        }
        let verdict = verdict(&points);
        Ok(SharpnessReport {
            delta,
            points,
            verdict,
            note: "Monte Carlo evidence at finite n, not a proof of sharpness or coarseness".into(),
        })
    }

    fn locate(
        &self,
        sampler: &ClauseSampler,
        m_star: f64,
        target: f64,
        seed: u64,
        budget: u64,
    ) -> Result<CrossingEstimate, LabError> {
        let n = sampler.n();
        let key = derive(&[seed, n as u64, target.to_bits()]);
        let mut lo = ((m_star / BRACKET_FACTOR).floor() as usize).max(1);
        let mut hi = ((m_star * BRACKET_FACTOR).ceil() as usize).max(lo + 1);
        let bracket = [lo, hi];

        let end_trials = (budget / 20).max(MIN_END_TRIALS);
        let ladder_budget = budget / 4;
        let ladder_trials = (ladder_budget / (2 * LADDER.len() as u64)).max(1);
        let spread = budget.saturating_sub(2 * end_trials + ladder_budget);
        let planned = planned_steps(lo, hi);
        let weight_total = planned * (planned + 1) / 2;

        let mut points = Vec::new();
        let mut used = 0;
        let mut redraws = 0;
        let mut eval = |m: usize, trials: u64, step: u64| -> Result<LevelPoint, LabError> {
            let t = self.evaluate(sampler, m, trials, derive(&[key, m as u64, step]))?;
            used += t.trials;
            redraws += t.redraws;
            let (ci_low, ci_high) = wilson_interval(t.sat, t.trials, DEFAULT_CONFIDENCE);
            let p = LevelPoint { m, trials: t.trials, sat_count: t.sat, p_hat: t.p_hat(), ci_low, ci_high };
            points.push(p.clone());
            Ok(p)
        };

        let mut p_lo = eval(lo, end_trials, 0)?.p_hat;
        let mut p_hi = eval(hi, end_trials, 0)?.p_hat;
        if p_lo < target || p_hi > target {
            return Err(LabError::Bracket { n, target, m_lo: lo, p_lo, m_hi: hi, p_hi });
        }
        for step in 1..=planned {
            if hi - lo <= 1 {
                break;
            }
            let mid = ((lo as f64 * hi as f64).sqrt().round() as usize).clamp(lo + 1, hi - 1);
            let trials = (spread * step / weight_total).max(1);
            let p = eval(mid, trials, step)?.p_hat;
            if p >= target {
                lo = mid;
                p_lo = p;
            } else {
                hi = mid;
                p_hi = p;
            }
        }

        let m_hat = if p_lo > p_hi {
            lo as f64 + (p_lo - target) / (p_lo - p_hi) * (hi - lo) as f64
        } else {
            0.5 * (lo + hi) as f64
        };
        let (mut left_done, mut right_done) = (false, false);
        for (j, &f) in LADDER.iter().enumerate() {
            let step = STEPS + 1 + j as u64;
            if !left_done {
                let m = (m_hat * (1.0 - f)).floor() as usize;
                if m >= bracket[0] && m >= 1 {
                    let p = eval(m, ladder_trials, step)?;
                    if p.ci_low > target {
                        left_done = true;
                    }
                }
            }
            if !right_done {
                let m = (m_hat * (1.0 + f)).ceil() as usize;
                if m <= bracket[1] {
                    let p = eval(m, ladder_trials, step)?;
                    if p.ci_high < target {
                        right_done = true;
                    }
                }
            }
        }
        let ci_low = points
            .iter()
            .filter(|p| p.m as f64 <= m_hat && p.ci_low > target)
            .map(|p| p.m)
            .max()
            .unwrap_or(bracket[0]) as f64;
        let ci_high = points
            .iter()
            .filter(|p| p.m as f64 >= m_hat && p.ci_high < target)
            .map(|p| p.m)
            .min()
            .unwrap_or(bracket[1]) as f64;
        Ok(CrossingEstimate {
            n,
            target,
            m_star,
            m_hat,
            ci: [ci_low.min(m_hat), ci_high.max(m_hat)],
            bracket,
            trials_used: used,
            redraws,
            points,
        })
    }
}

/// Bisection steps until the bracket is one clause wide, assuming the
/// target sits near the geometric middle of `[lo, hi]`.
fn planned_steps(lo: usize, hi: usize) -> u64 {
    let middle = (lo as f64 * hi as f64).sqrt();
    let mut ratio = hi as f64 / lo as f64;
    let mut steps = 0;
    while steps < STEPS && middle * (ratio - 1.0) > 1.0 {
        ratio = ratio.sqrt();
        steps += 1;
    }
    steps.max(1)
}

fn check_budget(budget: u64) -> Result<(), LabError> {
    if budget < MIN_BUDGET {
        return Err(LabError::Config(format!("budget {budget} is below the minimum {MIN_BUDGET}")));
    }
    Ok(())
}

fn width(crossing: CrossingEstimate, upper: CrossingEstimate, lower: CrossingEstimate) -> SharpnessPoint {
    let w = (lower.m_hat - upper.m_hat) / crossing.m_hat;
    let w_low = (lower.ci[0] - upper.ci[1]).max(0.0) / crossing.ci[1];
    let w_high = (lower.ci[1] - upper.ci[0]) / crossing.ci[0];
    SharpnessPoint {
        n: crossing.n,
        w,
        w_ci: [w_low.min(w), w_high.max(w)],
        crossing,
        upper_level: upper,
        lower_level: lower,
    }
}

fn verdict(points: &[SharpnessPoint]) -> Verdict {
    if points.len() < 2 {
        return Verdict::Inconclusive;
    }
    let (first, last) = (&points[0], &points[points.len() - 1]);
    let decreasing = points.windows(2).all(|p| p[1].w <= p[0].w);
    if decreasing && last.w_ci[1] < first.w_ci[0] {
        return Verdict::Shrinking;
    }
    let overlapping = points
        .windows(2)
        .all(|p| p[0].w_ci[0] <= p[1].w_ci[1] && p[1].w_ci[0] <= p[0].w_ci[1]);
    if overlapping {
        Verdict::Stable
    } else {
        Verdict::Inconclusive
    }
}
