//! Variable-probability distributions and the scalar quantities derived
//! from them.
//!
//! A [`Distribution`] is one member of an ensemble: `n` probabilities in
//! non-increasing order together with the moment sums that the threshold
//! formulas are written in. Moment sums are accumulated from the smallest
//! probability upwards with Neumaier compensation so heavy-tailed families
//! keep their tail mass.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::formula::{Formula, Var};

/// Relative slack allowed on `Σ p_i = 1`, per variable.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Largest clause width the generalized normalizer supports.
pub const MAX_ARITY: usize = 7;

#[derive(Debug, Error)]
pub enum DistError {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("weight {index} is {value}, weights must be positive and finite")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, which is off by more than {tolerance}")]
    NotNormalized { sum: f64, tolerance: f64 },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("variable {var} is outside 1..={n}")]
    VariableOutOfRange { var: u32, n: usize },
    #[error("variable {var} is repeated")]
    RepeatedVariable { var: u32 },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// An ensemble of distributions: a rule that yields a pmf for every `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleSpec {
    /// `p_i = 1/n`.
    Uniform,
    /// `p_i ∝ (n/i)^{1/(β-1)}` with `β > 2`.
    PowerLaw { beta: f64 },
    /// `p_i = b(1 - b^{-1/n})/(b - 1) · b^{-(i-1)/n}` with `b > 1`.
    Geometric { b: f64 },
    /// Arbitrary positive weights; `n` must equal their count.
    Explicit { weights: Vec<f64> },
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<(), DistError> {
        match self {
            EnsembleSpec::Uniform => Ok(()),
            EnsembleSpec::PowerLaw { beta } => {
                if beta.is_finite() && *beta > 2.0 {
                    Ok(())
                } else {
                    Err(DistError::InvalidParameter {
                        field: "beta",
                        reason: format!("{beta} is not a finite value > 2"),
                    })
                }
            }
            EnsembleSpec::Geometric { b } => {
                if b.is_finite() && *b > 1.0 {
                    Ok(())
                } else {
                    Err(DistError::InvalidParameter {
                        field: "b",
                        reason: format!("{b} is not a finite value > 1"),
                    })
                }
            }
            EnsembleSpec::Explicit { weights } => {
                match weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
                    Some(i) => Err(DistError::NonPositiveWeight { index: i + 1, value: weights[i] }),
                    None => Ok(()),
                }
            }
        }
    }

    /// Whether the family has a closed-form regime classification.
    pub fn is_builtin(&self) -> bool {
        !matches!(self, EnsembleSpec::Explicit { .. })
    }

    /// Natural size of an explicit ensemble.
    pub fn explicit_len(&self) -> Option<usize> {
        match self {
            EnsembleSpec::Explicit { weights } => Some(weights.len()),
            _ => None,
        }
    }

    pub fn from_weights_file(path: impl AsRef<Path>) -> Result<Self, DistError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| DistError::Io { path: path.display().to_string(), source })?;
        Ok(EnsembleSpec::Explicit { weights: parse_weights(&text)? })
    }

    pub fn instantiate(&self, n: usize) -> Result<Distribution, DistError> {
        instantiate(self, n)
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnsembleSpec::Uniform => write!(f, "uniform"),
            EnsembleSpec::PowerLaw { beta } => write!(f, "powerlaw:{beta}"),
            EnsembleSpec::Geometric { b } => write!(f, "geometric:{b}"),
            EnsembleSpec::Explicit { weights } => write!(f, "explicit[{}]", weights.len()),
        }
    }
}

/// Parses `uniform`, `powerlaw:BETA`, `geometric:B` or `file:PATH`.
impl FromStr for EnsembleSpec {
    type Err = DistError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let number = |field: &'static str| -> Result<f64, DistError> {
            let a = arg.ok_or_else(|| DistError::InvalidParameter {
                field,
                reason: format!("missing value in {s:?}"),
            })?;
            a.trim().parse().map_err(|_| DistError::InvalidParameter {
                field,
                reason: format!("{a:?} is not a number"),
            })
        };
        let spec = match head.trim().to_ascii_lowercase().as_str() {
            "uniform" if arg.is_none() => EnsembleSpec::Uniform,
            "powerlaw" => EnsembleSpec::PowerLaw { beta: number("beta")? },
            "geometric" => EnsembleSpec::Geometric { b: number("b")? },
            "file" => match arg {
                Some(path) if !path.is_empty() => EnsembleSpec::from_weights_file(path)?,
                _ => {
                    return Err(DistError::InvalidParameter {
                        field: "dist",
                        reason: "file: needs a path".into(),
                    })
                }
            },
            _ => {
                return Err(DistError::InvalidParameter {
                    field: "dist",
                    reason: format!(
                        "{s:?} is not one of uniform, powerlaw:BETA, geometric:B, file:PATH"
                    ),
                })
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One positive weight per line. `#` starts a comment; blank lines are
/// ignored.
pub fn parse_weights(text: &str) -> Result<Vec<f64>, DistError> {
    let mut weights = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let w: f64 = line.parse().map_err(|_| DistError::Parse {
            line: i + 1,
            reason: format!("{line:?} is not a number"),
        })?;
        if !(w.is_finite() && w > 0.0) {
            return Err(DistError::Parse {
                line: i + 1,
                reason: format!("weight {w} is not positive"),
            });
        }
        weights.push(w);
    }
    Ok(weights)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Uniform,
    PowerLaw { beta: f64 },
    Geometric { b: f64 },
    Explicit,
}

/// A probability vector `p_1 ≥ … ≥ p_n > 0` with its moment sums.
#[derive(Debug, Clone)]
pub struct Distribution {
    family: Family,
    p: Vec<f64>,
    /// `labels[i]` is the caller's 0-based index of the `i`-th largest
    /// probability. `None` when the input was already sorted.
    labels: Option<Vec<u32>>,
    sum_p: f64,
    sum_sq: f64,
    sum_sq_tail: f64,
    sum_p4: f64,
    c_const: f64,
    f_ratio: f64,
    q_max: f64,
}

/// Builds the `n`-th member of `spec`.
pub fn instantiate(spec: &EnsembleSpec, n: usize) -> Result<Distribution, DistError> {
    spec.validate()?;
    if n < 2 {
        return Err(DistError::InvalidParameter { field: "n", reason: format!("{n} < 2") });
    }
    if n > u32::MAX as usize / 2 {
        return Err(DistError::InvalidParameter { field: "n", reason: format!("{n} is too large") });
    }
    match spec {
        EnsembleSpec::Uniform => Distribution::build(Family::Uniform, vec![1.0; n], None),
        EnsembleSpec::PowerLaw { beta } => {
            let exponent = 1.0 / (beta - 1.0);
            let nf = n as f64;
            let w = (1..=n).map(|i| (nf / i as f64).powf(exponent)).collect();
            Distribution::build(Family::PowerLaw { beta: *beta }, w, None)
        }
        EnsembleSpec::Geometric { b } => {
            // 1 - b^{-1/n}, computed without cancellation.
            let step = b.ln() / n as f64;
            let head = b * -(-step).exp_m1() / (b - 1.0);
            let w = (0..n).map(|i| head * (-(i as f64) * step).exp()).collect();
            Distribution::build(Family::Geometric { b: *b }, w, None)
        }
        EnsembleSpec::Explicit { weights } => {
            if weights.len() != n {
                return Err(DistError::InvalidParameter {
                    field: "n",
                    reason: format!("{n} differs from the {} explicit weights", weights.len()),
                });
            }
            let mut order: Vec<u32> = (0..n as u32).collect();
            order.sort_by(|&a, &b| weights[b as usize].total_cmp(&weights[a as usize]));
            let sorted = order.iter().map(|&i| weights[i as usize]).collect();
            let identity = order.iter().enumerate().all(|(i, &j)| i as u32 == j);
            Distribution::build(Family::Explicit, sorted, (!identity).then_some(order))
        }
    }
}

impl Distribution {
    /// Wraps an already normalized probability vector. Deviations of the
    /// total from 1 up to `1e-12·n` are renormalized away; larger ones are
    /// rejected.
    pub fn from_probabilities(p: Vec<f64>) -> Result<Self, DistError> {
        let n = p.len();
        if n < 2 {
            return Err(DistError::InvalidParameter { field: "n", reason: format!("{n} < 2") });
        }
        if let Some(i) = p.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(DistError::NonPositiveWeight { index: i + 1, value: p[i] });
        }
        let sum = compensated_sum(p.iter().rev().copied());
        let tolerance = NORMALIZATION_TOLERANCE * n as f64;
        if (sum - 1.0).abs() > tolerance {
            return Err(DistError::NotNormalized { sum, tolerance });
        }
        instantiate(&EnsembleSpec::Explicit { weights: p }, n)
    }

    fn build(family: Family, weights: Vec<f64>, labels: Option<Vec<u32>>) -> Result<Self, DistError> {
        let n = weights.len();
        let total = compensated_sum(weights.iter().rev().copied());
        let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut d = Distribution {
            family,
            p,
            labels,
            sum_p: 0.0,
            sum_sq: 0.0,
            sum_sq_tail: 0.0,
            sum_p4: 0.0,
            c_const: 0.0,
            f_ratio: 0.0,
            q_max: 0.0,
        };
        d.sum_p = d.power_sum(1, 1);
        let tolerance = NORMALIZATION_TOLERANCE * n as f64;
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !((d.sum_p - 1.0).abs() <= tolerance) {
            return Err(DistError::NotNormalized { sum: d.sum_p, tolerance });
        }
        d.sum_sq = d.moment_sum(2, 1);
        d.sum_sq_tail = d.moment_sum(2, 2);
        d.sum_p4 = d.moment_sum(4, 1);
        d.c_const = 1.0 / (1.0 - d.sum_sq);
        d.f_ratio = d.sum_sq / (d.p[0] * d.p[0]);
        d.q_max = d.c_const * 0.5 * d.p[0] * d.p[1];
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// The probabilities in non-increasing order.
    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn probability(&self, v: Var) -> f64 {
        self.p[v.index()]
    }

    /// `p_1`.
    pub fn p1(&self) -> f64 {
        self.p[0]
    }

    /// `p_2`.
    pub fn p2(&self) -> f64 {
        self.p[1]
    }

    pub fn sum_p(&self) -> f64 {
        self.sum_p
    }

    /// `Σ_{i=1}^n p_i²`.
    pub fn sum_sq(&self) -> f64 {
        self.sum_sq
    }

    /// `Σ_{i=2}^n p_i²`.
    pub fn sum_sq_tail(&self) -> f64 {
        self.sum_sq_tail
    }

    /// `Σ_{i=1}^n p_i⁴`.
    pub fn sum_p4(&self) -> f64 {
        self.sum_p4
    }

    /// Normalizer `C = 1/(1 - Σp_i²)` of the 2-clause law.
    pub fn c_const(&self) -> f64 {
        self.c_const
    }

    /// `f(n) = Σp_i² / p_1²`.
    pub fn f_ratio(&self) -> f64 {
        self.f_ratio
    }

    /// Largest 2-clause probability, attained on the two most likely
    /// variables.
    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    /// Caller index of internal variable `v`.
    pub fn user_var(&self, v: Var) -> Var {
        match &self.labels {
            Some(l) => Var::new(l[v.index()]),
            None => v,
        }
    }

    /// Sorted-to-caller permutation, when the input was reordered.
    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    /// Rewrites a formula generated from this distribution into the
    /// caller's variable numbering.
    pub fn to_user(&self, f: &Formula) -> Formula {
        match &self.labels {
            Some(l) => f.relabel(l),
            None => f.clone(),
        }
    }

    /// `Σ_{i=from}^n p_i^exponent`, summed from `i = n` down to `from` with
    /// compensation.
    ///
    /// Panics unless `2 <= exponent <= 7` and `from` is 1 or 2.
    pub fn moment_sum(&self, exponent: u32, from: usize) -> f64 {
        assert!((2..=7).contains(&exponent), "exponent {exponent} outside 2..=7");
        assert!(from == 1 || from == 2, "from_index must be 1 or 2");
        self.power_sum(exponent as i32, from)
    }

    fn power_sum(&self, exponent: i32, from: usize) -> f64 {
        compensated_sum(self.p[from - 1..].iter().rev().map(|x| x.powi(exponent)))
    }

    /// `C_k = 1/(k! · e_k(p))`, where `e_k` is the elementary symmetric
    /// polynomial of degree `k`. `k! e_k` is the chance that `k` independent
    /// draws hit distinct variables. For `k = 2` this is `1/(1 - Σp_i²)`.
    pub fn normalizer(&self, k: usize) -> Result<f64, DistError> {
        self.check_arity(k)?;
        if k == 2 {
            return Ok(self.c_const);
        }
        // Newton–Girard: j e_j = Σ_{i=1}^{j} (-1)^{i-1} e_{j-i} P_i.
        let power: Vec<f64> =
            (0..=k).map(|i| if i == 0 { 0.0 } else { self.power_sum(i as i32, 1) }).collect();
        let mut e = vec![0.0; k + 1];
        e[0] = 1.0;
        for j in 1..=k {
            let mut acc = 0.0;
            for i in 1..=j {
                let term = e[j - i] * power[i];
                acc += if i % 2 == 1 { term } else { -term };
            }
            e[j] = acc / j as f64;
        }
        Ok(1.0 / (factorial(k) * e[k]))
    }

    /// Probability that one drawn clause is a given clause over `vars`
    /// (any fixed sign pattern): `C_k · k!/2^k · Π p_v`.
    pub fn clause_probability(&self, vars: &[Var]) -> Result<f64, DistError> {
        let k = vars.len();
        self.check_arity(k)?;
        for (i, v) in vars.iter().enumerate() {
            if v.index() >= self.n() {
                return Err(DistError::VariableOutOfRange { var: v.dimacs(), n: self.n() });
            }
            if vars[..i].contains(v) {
                return Err(DistError::RepeatedVariable { var: v.dimacs() });
            }
        }
        let product: f64 = vars.iter().map(|&v| self.probability(v)).product();
        Ok(self.normalizer(k)? * factorial(k) / (1u64 << k) as f64 * product)
    }

    /// Largest clause probability for width `k` (the `k` most likely
    /// variables).
    pub fn max_clause_probability(&self, k: usize) -> Result<f64, DistError> {
        self.check_arity(k)?;
        let top: Vec<Var> = (0..k as u32).map(Var::new).collect();
        self.clause_probability(&top)
    }

    fn check_arity(&self, k: usize) -> Result<(), DistError> {
        if !(2..=MAX_ARITY).contains(&k) || k > self.n() {
            return Err(DistError::InvalidParameter {
                field: "k",
                reason: format!("{k} must lie in 2..={} and not exceed n = {}", MAX_ARITY, self.n()),
            });
        }
        Ok(())
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (2..=k).map(|i| i as f64).product()
}

/// Neumaier summation.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
