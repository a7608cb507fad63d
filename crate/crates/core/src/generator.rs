//! The clause-drawing random k-SAT generator.
//!
//! Each clause draws `k` variables i.i.d. from the distribution and throws
//! the whole tuple away if any two coincide, then negates each variable with
//! probability 1/2. Clause `i` of a formula generated with seed `s` uses
//! only the counter stream [`Stream::for_clause`]`(s, i)`: two words per
//! variable draw (column, coin) for as many attempts as it takes, followed
//! by one word whose low `k` bits are the signs. Output therefore does not
//! depend on how clause indices are spread over threads.

use rayon::prelude::*;
use thiserror::Error;

use crate::alias::AliasTable;
use crate::dist::{Distribution, MAX_ARITY};
use crate::formula::{Formula, Literal, Var};
use crate::rng::Stream;

pub const DEFAULT_RETRY_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Maximum number of tuple draws per clause.
    pub retry_cap: u64,
}

impl GeneratorConfig {
    pub fn new(seed: u64) -> Self {
        GeneratorConfig { seed, retry_cap: DEFAULT_RETRY_CAP }
    }
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig::new(0)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("clause {clause}: no collision-free tuple in {attempts} draws (collision rate so far {collision_rate:.6})")]
    RetryCapExceeded { clause: u64, attempts: u64, collision_rate: f64 },
    #[error("arity {k} is not supported for n = {n} (need 2 <= k <= min(n, {MAX_ARITY}))")]
    Arity { k: usize, n: usize },
    #[error("retry_cap must be at least 1")]
    RetryCap,
}

/// Alias table plus clause width; build once, draw many formulas.
#[derive(Debug, Clone)]
pub struct ClauseSampler {
    table: AliasTable,
    n: usize,
    k: usize,
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    attempts: u64,
    collisions: u64,
}

impl ClauseSampler {
    pub fn new(d: &Distribution, k: usize) -> Result<Self, GenError> {
        if !(2..=MAX_ARITY).contains(&k) || k > d.n() {
            return Err(GenError::Arity { k, n: d.n() });
        }
        Ok(ClauseSampler { table: AliasTable::new(d.probabilities()), n: d.n(), k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Draws clause `index` of the formula seeded with `seed` into `out`
    /// (length `k`).
    pub fn sample_clause(
        &self,
        seed: u64,
        index: u64,
        retry_cap: u64,
        out: &mut [Literal],
    ) -> Result<(), GenError> {
        let mut tally = Tally::default();
        self.draw(seed, index, retry_cap, out, &mut tally)
    }

    #[inline]
    fn draw(
        &self,
        seed: u64,
        index: u64,
        retry_cap: u64,
        out: &mut [Literal],
        tally: &mut Tally,
    ) -> Result<(), GenError> {
        debug_assert_eq!(out.len(), self.k);
        let mut stream = Stream::for_clause(seed, index);
        let mut vars = [0u32; MAX_ARITY];
        let vars = &mut vars[..self.k];
        for _ in 0..retry_cap {
            tally.attempts += 1;
            for slot in vars.iter_mut() {
                *slot = self.table.sample(&mut stream);
            }
            if all_distinct(vars) {
                let signs = stream.next_u64();
                for (j, (lit, &v)) in out.iter_mut().zip(vars.iter()).enumerate() {
                    *lit = Var::new(v).literal(signs >> j & 1 == 1);
                }
                return Ok(());
            }
            tally.collisions += 1;
        }
        Err(GenError::RetryCapExceeded {
            clause: index,
            attempts: retry_cap,
            collision_rate: tally.collisions as f64 / tally.attempts as f64,
        })
    }

    /// Fills `f` with clauses `0..m` for `cfg.seed`, reusing its buffers.
    pub fn sample_into(&self, m: usize, cfg: &GeneratorConfig, f: &mut Formula) -> Result<(), GenError> {
        if cfg.retry_cap == 0 {
            return Err(GenError::RetryCap);
        }
        f.clear_to(self.n, self.k);
        f.reserve(m, m * self.k);
        let mut buf = [Literal::from_code(0); MAX_ARITY];
        let clause = &mut buf[..self.k];
        let mut tally = Tally::default();
        for i in 0..m as u64 {
            self.draw(cfg.seed, i, cfg.retry_cap, clause, &mut tally)?;
            f.push_unchecked(clause);
        }
        Ok(())
    }

    pub fn sample(&self, m: usize, cfg: &GeneratorConfig) -> Result<Formula, GenError> {
        let mut f = Formula::with_arity(self.n, self.k);
        self.sample_into(m, cfg, &mut f)?;
        Ok(f)
    }

    /// Same output as [`ClauseSampler::sample`], with clause indices split
    /// into chunks and drawn on the current rayon pool.
    pub fn sample_par(&self, m: usize, cfg: &GeneratorConfig) -> Result<Formula, GenError> {
        if cfg.retry_cap == 0 {
            return Err(GenError::RetryCap);
        }
        const CHUNK: usize = 1 << 14;
        let k = self.k;
        let chunks: Vec<Vec<Literal>> = (0..m.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(m);
                let mut lits = vec![Literal::from_code(0); (hi - lo) * k];
                let mut tally = Tally::default();
                for (i, out) in (lo..hi).zip(lits.chunks_exact_mut(k)) {
                    self.draw(cfg.seed, i as u64, cfg.retry_cap, out, &mut tally)?;
                }
                Ok(lits)
            })
            .collect::<Result<_, GenError>>()?;
        let mut f = Formula::with_arity(self.n, k);
        f.reserve(m, m * k);
        for lits in &chunks {
            for clause in lits.chunks_exact(k) {
                f.push_unchecked(clause);
            }
        }
        Ok(f)
    }
}

#[inline]
fn all_distinct(vars: &[u32]) -> bool {
    match vars {
        [a, b] => a != b,
        _ => (1..vars.len()).all(|i| !vars[..i].contains(&vars[i])),
    }
}

/// Draws an `m`-clause, width-`k` formula from `d`. Variables are numbered
/// in the distribution's sorted order; see [`Distribution::to_user`].
pub fn sample_formula(
    d: &Distribution,
    k: usize,
    m: usize,
    cfg: &GeneratorConfig,
) -> Result<Formula, GenError> {
    ClauseSampler::new(d, k)?.sample(m, cfg)
}

/// [`sample_formula`] on a dedicated pool of `workers` threads.
pub fn sample_formula_with_workers(
    d: &Distribution,
    k: usize,
    m: usize,
    cfg: &GeneratorConfig,
    workers: usize,
) -> Result<Formula, GenError> {
    let sampler = ClauseSampler::new(d, k)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| sampler.sample_par(m, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{instantiate, EnsembleSpec};

    #[test]
    fn two_variables_always_pair_up() {
        let d = instantiate(&EnsembleSpec::Uniform, 2).unwrap();
        for seed in 0..200 {
            let f = sample_formula(&d, 2, 1, &GeneratorConfig::new(seed)).unwrap();
            let mut vars: Vec<u32> = f.clause(0).iter().map(|l| l.var().dimacs()).collect();
            vars.sort();
            assert_eq!(vars, vec![1, 2]);
        }
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let d = instantiate(&EnsembleSpec::PowerLaw { beta: 2.5 }, 100).unwrap();
        let a = sample_formula(&d, 2, 500, &GeneratorConfig::new(7)).unwrap();
        let b = sample_formula(&d, 2, 500, &GeneratorConfig::new(7)).unwrap();
        let c = sample_formula(&d, 2, 500, &GeneratorConfig::new(8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        // Prefix stability: clause i depends only on (seed, i).
        let short = sample_formula(&d, 2, 100, &GeneratorConfig::new(7)).unwrap();
        assert_eq!(short, a.prefix(100));
    }

    #[test]
    fn parallel_matches_sequential() {
        let d = instantiate(&EnsembleSpec::Geometric { b: 2.0 }, 50).unwrap();
        let cfg = GeneratorConfig::new(11);
        let seq = sample_formula(&d, 3, 40_000, &cfg).unwrap();
        for workers in [1, 3] {
            assert_eq!(sample_formula_with_workers(&d, 3, 40_000, &cfg, workers).unwrap(), seq);
        }
    }

    #[test]
    fn retry_cap_reports_clause() {
        let d = Distribution::from_probabilities(vec![1.0 - 1e-9, 1e-9]).unwrap();
        let cfg = GeneratorConfig { seed: 1, retry_cap: 5 };
        match sample_formula(&d, 2, 3, &cfg) {
            Err(GenError::RetryCapExceeded { clause: 0, attempts: 5, collision_rate }) => {
                assert_eq!(collision_rate, 1.0)
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            sample_formula(&d, 2, 3, &GeneratorConfig { seed: 1, retry_cap: 0 }),
            Err(GenError::RetryCap)
        );
    }

    #[test]
    fn arity_checked() {
        let d = instantiate(&EnsembleSpec::Uniform, 3).unwrap();
        assert_eq!(ClauseSampler::new(&d, 4).unwrap_err(), GenError::Arity { k: 4, n: 3 });
        let f = sample_formula(&d, 3, 10, &GeneratorConfig::new(0)).unwrap();
        assert_eq!(f.arity(), Some(3));
        assert!(f.clauses().all(|c| {
            let mut v: Vec<_> = c.iter().map(|l| l.var()).collect();
            v.sort();
            v.dedup();
            v.len() == 3
        }));
    }
}
