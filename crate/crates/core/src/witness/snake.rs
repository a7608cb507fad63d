use std::collections::{BTreeMap, HashMap, HashSet};

use crate::formula::{Formula, Literal, Var};

use super::{require_two_cnf, WitnessError};

/// Largest snake size the census enumerates.
pub const MAX_CENSUS_T: usize = 3;

/// Path extensions allowed per census call.
pub const DEFAULT_CENSUS_BUDGET: u64 = 50_000_000;

/// A sequence `w_1, …, w_{2t-1}` of literals over distinct variables.
///
/// Its clause set consists of `(w̄_i, w_{i+1})` for `0 <= i <= 2t-1` with
/// `w_0 = w_{2t} = w̄_t`, which reads as the implication cycle
/// `w̄_t → w_1 → … → w_t → … → w_{2t-1} → w̄_t` and is unsatisfiable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Snake {
    w: Vec<Literal>,
}

impl Snake {
    pub fn new(w: Vec<Literal>) -> Result<Self, WitnessError> {
        if w.len() < 3 || w.len().is_multiple_of(2) {
            return Err(WitnessError::InvalidSnake {
                reason: format!("length {} is not 2t-1 for some t >= 2", w.len()),
            });
        }
        for (i, l) in w.iter().enumerate() {
            if w[..i].iter().any(|p| p.var() == l.var()) {
                return Err(WitnessError::InvalidSnake {
                    reason: format!("variable {} repeats", l.var()),
                });
            }
        }
        Ok(Snake { w })
    }

    pub fn from_dimacs(w: &[i64]) -> Result<Self, WitnessError> {
        let lits = w
            .iter()
            .map(|&d| {
                Literal::from_dimacs(d)
                    .ok_or_else(|| WitnessError::InvalidSnake { reason: format!("bad literal {d}") })
            })
            .collect::<Result<_, _>>()?;
        Snake::new(lits)
    }

    /// Size parameter `t`.
    pub fn t(&self) -> usize {
        self.w.len().div_ceil(2)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.w
    }

    /// `w_t`.
    pub fn central_literal(&self) -> Literal {
        self.w[self.t() - 1]
    }

    pub fn central(&self) -> Var {
        self.central_literal().var()
    }

    pub fn num_vars(&self) -> usize {
        self.w.iter().map(|l| l.var().index() + 1).max().unwrap_or(0)
    }

    /// The three alternative sequences that keep the central literal and
    /// produce the same clause set: either half may be replaced by its
    /// reversed negation.
    pub fn half_flips(&self) -> [Snake; 3] {
        let c = self.t() - 1;
        let (first, rest) = self.w.split_at(c);
        let center = rest[0];
        let last = &rest[1..];
        let build = |a: &[Literal], b: &[Literal]| {
            let mut w = a.to_vec();
            w.push(center);
            w.extend_from_slice(b);
            Snake { w }
        };
        let nf = reversed_negation(first);
        let nl = reversed_negation(last);
        [build(&nf, last), build(first, &nl), build(&nf, &nl)]
    }

    /// All eight sequences with this clause set: the identity, the three
    /// half flips, and the reversed negation of each.
    pub fn orbit(&self) -> Vec<Snake> {
        let mut out = vec![self.clone()];
        out.extend(self.half_flips());
        let mirrored: Vec<Snake> =
            out.iter().map(|s| Snake { w: reversed_negation(&s.w) }).collect();
        out.extend(mirrored);
        out
    }

    /// Lexicographically least member of [`Snake::orbit`] (by literal code).
    pub fn canonical(&self) -> Snake {
        self.orbit().into_iter().min().expect("orbit is non-empty")
    }

    pub fn to_formula(&self) -> Formula {
        Formula::new(self.num_vars(), &snake_clauses(self)).expect("snake clauses are valid")
    }
}

fn reversed_negation(w: &[Literal]) -> Vec<Literal> {
    w.iter().rev().map(|&l| !l).collect()
}

/// The `2t` clauses `(w̄_i, w_{i+1})`, `i = 0..2t-1`, with `w_0 = w_{2t} = w̄_t`.
pub fn snake_clauses(s: &Snake) -> Vec<[Literal; 2]> {
    let len = s.w.len();
    let not_center = !s.central_literal();
    let at = |i: usize| if i == 0 || i == len + 1 { not_center } else { s.w[i - 1] };
    (0..=len).map(|i| [!at(i), at(i + 1)]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SnakeOccurrence {
    /// How many complete copies of the clause set the formula holds: the
    /// smallest multiplicity among its `2t` clauses.
    pub multiplicity: usize,
    /// Every one of the `2t` clauses occurs exactly once.
    pub exactly_once: bool,
}

/// Snake clause sets present in a formula, keyed by canonical sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SnakeCensus {
    pub t: usize,
    pub classes: BTreeMap<Snake, SnakeOccurrence>,
}

impl SnakeCensus {
    pub fn exactly_once_classes(&self) -> usize {
        self.classes.values().filter(|o| o.exactly_once).count()
    }

    /// Number of snake sequences (not clause sets) whose clause set appears
    /// exactly once. Each clause set is produced by eight sequences.
    pub fn exactly_once_sequences(&self) -> usize {
        8 * self.exactly_once_classes()
    }
}

fn pair_key(a: Literal, b: Literal) -> (u32, u32) {
    if a <= b {
        (a.code(), b.code())
    } else {
        (b.code(), a.code())
    }
}

struct Enumerator<'a> {
    adj: &'a [Vec<Literal>],
    used: Vec<bool>,
    budget: u64,
}

impl Enumerator<'_> {
    /// All paths `from → x_1 → … → x_{len-1} → to` of exactly `len` edges
    /// whose inner literals use fresh variables. Only inner literals are
    /// reported.
    fn paths(&mut self, from: Literal, to: Literal, len: usize, out: &mut Vec<Vec<Literal>>) -> bool {
        let mut inner = Vec::with_capacity(len);
        self.walk(from, to, len, &mut inner, out)
    }

    fn walk(
        &mut self,
        at: Literal,
        to: Literal,
        left: usize,
        inner: &mut Vec<Literal>,
        out: &mut Vec<Vec<Literal>>,
    ) -> bool {
        let adj = self.adj;
        if left == 1 {
            if adj[at.code() as usize].binary_search(&to).is_ok() {
                out.push(inner.clone());
            }
            return true;
        }
        for &next in &adj[at.code() as usize] {
            if self.used[next.var().index()] {
                continue;
            }
            if self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            self.used[next.var().index()] = true;
            inner.push(next);
            let ok = self.walk(next, to, left - 1, inner, out);
            inner.pop();
            self.used[next.var().index()] = false;
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Finds every snake of size `t` whose clause set is contained in `f`.
pub fn count_snake_occurrences(f: &Formula, t: usize) -> Result<SnakeCensus, WitnessError> {
    count_snake_occurrences_with_budget(f, t, DEFAULT_CENSUS_BUDGET)
}

pub fn count_snake_occurrences_with_budget(
    f: &Formula,
    t: usize,
    budget: u64,
) -> Result<SnakeCensus, WitnessError> {
    require_two_cnf(f)?;
    if t < 2 {
        return Err(WitnessError::InvalidSnake { reason: format!("size {t} < 2") });
    }
    if t > MAX_CENSUS_T {
        return Err(WitnessError::Budget { t, budget });
    }
    let mut census = SnakeCensus { t, classes: BTreeMap::new() };
    if f.is_empty() {
        return Ok(census);
    }

    let mut counts: HashMap<(u32, u32), usize> = HashMap::with_capacity(f.num_clauses());
    for c in f.clauses() {
        *counts.entry(pair_key(c[0], c[1])).or_default() += 1;
    }
    let mut adj = vec![Vec::new(); 2 * f.num_vars()];
    for &(a, b) in counts.keys() {
        let (a, b) = (Literal::from_code(a), Literal::from_code(b));
        adj[(!a).code() as usize].push(b);
        adj[(!b).code() as usize].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }

    let mut en = Enumerator { adj: &adj, used: vec![false; f.num_vars()], budget };
    let mut seen: HashSet<Snake> = HashSet::new();
    let mut into_center = Vec::new();
    let mut out_of_center = Vec::new();
    for code in 0..2 * f.num_vars() as u32 {
        let center = Literal::from_code(code);
        if adj[code as usize].is_empty() {
            continue;
        }
        into_center.clear();
        out_of_center.clear();
        en.used[center.var().index()] = true;
        let ok = en.paths(!center, center, t, &mut into_center)
            && en.paths(center, !center, t, &mut out_of_center);
        en.used[center.var().index()] = false;
        if !ok {
            return Err(WitnessError::Budget { t, budget });
        }
        for head in &into_center {
            for tail in &out_of_center {
                if head.iter().any(|a| tail.iter().any(|b| a.var() == b.var())) {
                    continue;
                }
                let mut w = head.clone();
                w.push(center);
                w.extend_from_slice(tail);
                let canonical = Snake { w }.canonical();
                if !seen.insert(canonical.clone()) {
                    continue;
                }
                let mults: Vec<usize> = snake_clauses(&canonical)
                    .iter()
                    .map(|c| counts.get(&pair_key(c[0], c[1])).copied().unwrap_or(0))
                    .collect();
                let occurrence = SnakeOccurrence {
                    multiplicity: mults.iter().copied().min().unwrap_or(0),
                    exactly_once: mults.iter().all(|&m| m == 1),
                };
                census.classes.insert(canonical, occurrence);
            }
        }
    }
    Ok(census)
}
