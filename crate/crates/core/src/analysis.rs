//! Closed-form threshold predictions and probability bounds.
//!
//! Regimes follow the three-way split on the pmf:
//!
//! | regime | condition                                   | threshold                         | kind   |
//! |--------|---------------------------------------------|-----------------------------------|--------|
//! | Case1  | `p_1² = Θ(Σp²)`, `p_2² = Θ(Σ_{i≥2}p²)`       | `Θ((1-Σp²)/(p_1·(Σ_{i≥2}p²)^½))`  | coarse |
//! | Case2  | `p_1² = Θ(Σp²)`, `p_2² = o(Σ_{i≥2}p²)`       | same order                        | coarse |
//! | Case3  | `p_1² = o(Σp²)`                             | exactly `1/Σp²`                   | sharp  |
//!
//! In the coarse cases only the order is known; the reported `m_star` is
//! the order expression itself, with an implicit constant of 1.

use serde::Serialize;
use thiserror::Error;

use crate::dist::{instantiate, DistError, Distribution, EnsembleSpec, Family};

/// Default tolerance on fitted log-log slopes.
pub const DEFAULT_SLOPE_TOL: f64 = 0.05;

/// Single-distribution fallback: `p_1²/Σp²` at or below this counts as
/// vanishing.
pub const SINGLE_PMF_RATIO: f64 = 0.05;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("precondition violated: {0}")]
    Domain(String),
    #[error("insufficient n grid: {0}")]
    InsufficientGrid(String),
    #[error(transparent)]
    Dist(#[from] DistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Case1,
    Case2,
    Case3,
}

impl Regime {
    pub fn is_sharp(self) -> bool {
        self == Regime::Case3
    }
}

/// How a regime was decided.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegimeBasis {
    /// Known asymptotics of a built-in family.
    ClosedForm,
    /// Least-squares slopes of `log r₁` (and `log r₂`) against `log n`.
    SlopeFit { slope_r1: f64, slope_r2: Option<f64>, slope_tol: f64, n_grid: Vec<usize> },
    /// One distribution only; ratios compared against a fixed cut-off.
    SinglePmf { r1: f64, r2: f64, cutoff: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeCall {
    pub regime: Regime,
    pub basis: RegimeBasis,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `p_1² / Σp²`.
    pub r1: f64,
    /// `p_2² / Σ_{i≥2}p²`.
    pub r2: f64,
    pub f_ratio: f64,
    pub q_max: f64,
    pub sum_sq: f64,
    pub c_const: f64,
}

impl Diagnostics {
    pub fn of(d: &Distribution) -> Self {
        Diagnostics {
            r1: d.p1() * d.p1() / d.sum_sq(),
            r2: d.p2() * d.p2() / d.sum_sq_tail(),
            f_ratio: d.f_ratio(),
            q_max: d.q_max(),
            sum_sq: d.sum_sq(),
            c_const: d.c_const(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaTag {
    /// `1 / Σp_i²`.
    InverseSumSquares,
    /// `(1 - Σp_i²) / (p_1 · (Σ_{i≥2} p_i²)^{1/2})`, an order estimate.
    CoarseOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub regime: Regime,
    pub m_star: f64,
    pub sharp: bool,
    pub formula_tag: FormulaTag,
    pub m_sharp_formula: f64,
    pub m_coarse_formula: f64,
    pub diagnostics: Diagnostics,
    pub basis: RegimeBasis,
    pub note: String,
}

/// `1/Σp²`; exact for the uniform family.
pub fn sharp_threshold(d: &Distribution) -> f64 {
    match d.family() {
        // Σ (1/n)² = 1/n in exact arithmetic.
        Family::Uniform => d.n() as f64,
        _ => 1.0 / d.sum_sq(),
    }
}

/// `(1 - Σp²)/(p_1 · (Σ_{i≥2} p²)^{1/2})`.
pub fn coarse_threshold(d: &Distribution) -> f64 {
    (1.0 - d.sum_sq()) / (d.p1() * d.sum_sq_tail().sqrt())
}

pub fn predict_threshold(d: &Distribution) -> ThresholdReport {
    let call = match family_spec(d.family()) {
        Some(spec) => classify_builtin(&spec),
        None => classify_single(d),
    };
    let m_sharp = sharp_threshold(d);
    let m_coarse = coarse_threshold(d);
    let (m_star, tag) = if call.regime.is_sharp() {
        (m_sharp, FormulaTag::InverseSumSquares)
    } else {
        (m_coarse, FormulaTag::CoarseOrder)
    };
    let mut note = call.note;
    if !call.regime.is_sharp() {
        note.push_str("; coarse regime: m_star is an order estimate, the constant factor is unknown");
    }
    ThresholdReport {
        n: d.n(),
        regime: call.regime,
        m_star,
        sharp: call.regime.is_sharp(),
        formula_tag: tag,
        m_sharp_formula: m_sharp,
        m_coarse_formula: m_coarse,
        diagnostics: Diagnostics::of(d),
        basis: call.basis,
        note,
    }
}

fn family_spec(f: Family) -> Option<EnsembleSpec> {
    match f {
        Family::Uniform => Some(EnsembleSpec::Uniform),
        Family::PowerLaw { beta } => Some(EnsembleSpec::PowerLaw { beta }),
        Family::Geometric { b } => Some(EnsembleSpec::Geometric { b }),
        Family::Explicit => None,
    }
}

fn classify_builtin(spec: &EnsembleSpec) -> RegimeCall {
    let (regime, note) = match spec {
        EnsembleSpec::Uniform => (Regime::Case3, "uniform: p_1² = 1/n² = o(1/n)".to_string()),
        EnsembleSpec::PowerLaw { beta } if *beta >= 3.0 => (
            Regime::Case3,
            format!("power law β = {beta} >= 3: p_1² = o(Σp²)"),
        ),
        EnsembleSpec::PowerLaw { beta } => (
            Regime::Case1,
            format!("power law β = {beta} < 3: p_1² and p_2² carry a constant share of Σp²"),
        ),
        EnsembleSpec::Geometric { b } => (
            Regime::Case3,
            format!("geometric b = {b}: p_1²/Σp² = Θ(1/n)"),
        ),
        EnsembleSpec::Explicit { .. } => unreachable!("explicit ensembles have no closed form"),
    };
    RegimeCall { regime, basis: RegimeBasis::ClosedForm, note: format!("closed form, {note}") }
}

fn classify_single(d: &Distribution) -> RegimeCall {
    let diag = Diagnostics::of(d);
    let regime = if diag.r1 <= SINGLE_PMF_RATIO {
        Regime::Case3
    } else if diag.r2 <= SINGLE_PMF_RATIO {
        Regime::Case2
    } else {
        Regime::Case1
    };
    RegimeCall {
        regime,
        basis: RegimeBasis::SinglePmf { r1: diag.r1, r2: diag.r2, cutoff: SINGLE_PMF_RATIO },
        note: format!(
            "heuristic: a single distribution cannot show o(1) vs Θ(1); ratios at or below {SINGLE_PMF_RATIO} are treated as vanishing"
        ),
    }
}

/// Regime of an ensemble. Built-in families use their known asymptotics;
/// explicit weights describe only one distribution and need
/// [`classify_regime_with`] and a rule for other sizes.
pub fn classify_regime(spec: &EnsembleSpec, n_grid: &[usize]) -> Result<RegimeCall, AnalysisError> {
    spec.validate()?;
    if spec.is_builtin() {
        return Ok(classify_builtin(spec));
    }
    let _ = n_grid;
    Err(AnalysisError::InsufficientGrid(
        "explicit weights define a single distribution; supply an ensemble rule".into(),
    ))
}

/// Slope-fit classification of an arbitrary ensemble.
///
/// `log r₁` is regressed on `log n`. A slope below `-slope_tol` reads as
/// `r₁ = o(1)` (Case3); otherwise `r₁ = Θ(1)` and the same test on `r₂`
/// separates Case2 from Case1. The grid needs three or more increasing
/// sizes spanning at least two decades.
pub fn classify_regime_with<F>(
    ensemble: F,
    n_grid: &[usize],
    slope_tol: f64,
) -> Result<RegimeCall, AnalysisError>
where
    F: Fn(usize) -> Result<Distribution, DistError>,
{
    if n_grid.len() < 3 {
        return Err(AnalysisError::InsufficientGrid(format!(
            "{} points, need at least 3",
            n_grid.len()
        )));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::InsufficientGrid("sizes must increase".into()));
    }
    let span = *n_grid.last().unwrap() as f64 / n_grid[0] as f64;
    if span < 100.0 {
        return Err(AnalysisError::InsufficientGrid(format!(
            "grid spans a factor {span:.1}, need at least 100"
        )));
    }
    let mut log_n = Vec::with_capacity(n_grid.len());
    let mut log_r1 = Vec::with_capacity(n_grid.len());
    let mut log_r2 = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let diag = Diagnostics::of(&ensemble(n)?);
        log_n.push((n as f64).ln());
        log_r1.push(diag.r1.ln());
        log_r2.push(diag.r2.ln());
    }
    let slope_r1 = slope(&log_n, &log_r1);
    let (regime, slope_r2) = if slope_r1 < -slope_tol {
        (Regime::Case3, None)
    } else {
        let s2 = slope(&log_n, &log_r2);
        (if s2 < -slope_tol { Regime::Case2 } else { Regime::Case1 }, Some(s2))
    };
    Ok(RegimeCall {
        regime,
        basis: RegimeBasis::SlopeFit { slope_r1, slope_r2, slope_tol, n_grid: n_grid.to_vec() },
        note: format!(
            "heuristic: log-log slope of p_1²/Σp² is {slope_r1:.4} over n in [{}, {}]; slopes below -{slope_tol} read as o(1)",
            n_grid[0],
            n_grid.last().unwrap()
        ),
    })
}

/// [`classify_regime_with`] on a built-in family, ignoring its closed form.
pub fn fit_regime(spec: &EnsembleSpec, n_grid: &[usize], slope_tol: f64) -> Result<RegimeCall, AnalysisError> {
    classify_regime_with(|n| instantiate(spec, n), n_grid, slope_tol)
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Inclusion–exclusion lower bound on `Pr(unsat)` from the `2^k` clauses
/// over the most likely variables:
/// `(1 - e^{-q m})^{2^k} - q² 2^{2k} m (1 + e^{-q m})^{2^k}`.
/// Can be negative; see [`clamp_probability`].
pub fn unsat_bound_inclusion_exclusion(q_max: f64, m: f64, k: u32) -> f64 {
    let patterns = 1i32 << k;
    let decay = (-q_max * m).exp();
    let miss = -(-q_max * m).exp_m1();
    miss.powi(patterns) - q_max * q_max * 4f64.powi(k as i32) * m * (1.0 + decay).powi(patterns)
}

/// `2 - (1 + e^{-q m})^{2^k}`, a lower bound on `Pr(unsat)` useful when
/// `q_max` is a constant.
pub fn unsat_bound_constant_q(q_max: f64, m: f64, k: u32) -> f64 {
    2.0 - (1.0 + (-q_max * m).exp()).powi(1i32 << k)
}

pub fn clamp_probability(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// Lower bound on the expected number of size-`t` snake sequences whose
/// clause set appears exactly once in an `m`-clause formula:
///
/// `½ (m-2t)^{2t} C^{2t} e^{-(m-2t)·2t q/(1-2t q)} Σp⁴ (Σ_{i≥2}p² - (2t-2)p_2²)^{2t-2}`.
///
/// Evaluated in log space. Returns 0 when the last factor is not positive.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn expected_snakes_lower_bound(d: &Distribution, m: f64, t: usize) -> Result<f64, AnalysisError> {
    if t < 2 {
        return Err(AnalysisError::Domain(format!("t = {t} must be at least 2")));
    }
    let two_t = 2.0 * t as f64;
    if !(m > two_t) {
        return Err(AnalysisError::Domain(format!("m = {m} must exceed 2t = {two_t}")));
    }
    let q = d.q_max();
    if !(two_t * q < 1.0) {
        return Err(AnalysisError::Domain(format!("2t·q_max = {} must be below 1", two_t * q)));
    }
    let tail = d.sum_sq_tail() - (two_t - 2.0) * d.p2() * d.p2();
    if tail <= 0.0 {
        return Ok(0.0);
    }
    let log = -std::f64::consts::LN_2
        + two_t * (m - two_t).ln()
        + two_t * d.c_const().ln()
        - (m - two_t) * two_t * q / (1.0 - two_t * q)
        + d.sum_p4().ln()
        + (two_t - 2.0) * tail.ln();
    Ok(log.exp())
}

/// Snake size used for sharp-regime diagnostics: `⌈ln² f(n)⌉`, at least 2.
pub fn default_snake_size(d: &Distribution) -> usize {
    let l = d.f_ratio().ln();
    ((l * l).ceil() as usize).max(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesBound {
    /// Sum value, or `+∞` when divergent.
    pub value: f64,
    pub divergent: bool,
}

/// First-moment bound on the probability that an `m`-clause formula has a
/// bicycle (and hence on `Pr(unsat)`):
/// `2 Σ_{t=2}^{t_max} (C m)^{t+1} t² p_1² (Σp²)^t`.
///
/// Flagged divergent, with value `+∞`, when `C m Σp² >= 1`.
pub fn bicycle_expectation_upper_bound(d: &Distribution, m: f64, t_max: usize) -> SeriesBound {
    let cm = d.c_const() * m;
    if cm * d.sum_sq() >= 1.0 {
        return SeriesBound { value: f64::INFINITY, divergent: true };
    }
    if m <= 0.0 {
        return SeriesBound { value: 0.0, divergent: false };
    }
    let (ln_cm, ln_s, ln_p1sq) = (cm.ln(), d.sum_sq().ln(), 2.0 * d.p1().ln());
    let mut total = 0.0;
    for t in 2..=t_max {
        let tf = t as f64;
        let term = ((tf + 1.0) * ln_cm + 2.0 * tf.ln() + ln_p1sq + tf * ln_s).exp();
        total += term;
        if term < total * 1e-18 {
            break;
        }
    }
    SeriesBound { value: 2.0 * total, divergent: false }
}

/// Every bound evaluated at one `(d, m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub m: f64,
    pub q_max: f64,
    pub inclusion_exclusion: RawAndClamped,
    pub constant_q: RawAndClamped,
    pub snakes: SnakeBound,
    pub bicycles: BicycleBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RawAndClamped {
    pub raw: f64,
    pub clamped: f64,
}

impl RawAndClamped {
    fn new(raw: f64) -> Self {
        RawAndClamped { raw, clamped: clamp_probability(raw) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnakeBound {
    pub t: usize,
    pub expected_lower_bound: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BicycleBound {
    pub t_max: usize,
    pub value: f64,
    pub divergent: bool,
}

pub fn bounds_report(d: &Distribution, m: f64, snake_t: usize, t_max: usize) -> BoundsReport {
    let q = d.q_max();
    let snakes = match expected_snakes_lower_bound(d, m, snake_t) {
        Ok(v) => SnakeBound { t: snake_t, expected_lower_bound: Some(v), error: None },
        Err(e) => SnakeBound { t: snake_t, expected_lower_bound: None, error: Some(e.to_string()) },
    };
    let bic = bicycle_expectation_upper_bound(d, m, t_max);
    BoundsReport {
        n: d.n(),
        m,
        q_max: q,
        inclusion_exclusion: RawAndClamped::new(unsat_bound_inclusion_exclusion(q, m, 2)),
        constant_q: RawAndClamped::new(unsat_bound_constant_q(q, m, 2)),
        snakes,
        bicycles: BicycleBound { t_max, value: bic.value, divergent: bic.divergent },
    }
}
