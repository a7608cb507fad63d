//! Variables, literals and CNF formulas.

use std::fmt;

use thiserror::Error;

/// A propositional variable, stored 0-based. DIMACS index is `index() + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(into = "i64")]
pub struct Var(u32);

impl Var {
    pub const fn new(index: u32) -> Self {
        Var(index)
    }

    /// From a 1-based DIMACS index.
    pub fn from_dimacs(index: u32) -> Option<Self> {
        index.checked_sub(1).map(Var)
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn dimacs(self) -> u32 {
        self.0 + 1
    }

    #[inline]
    pub const fn positive(self) -> Literal {
        Literal(self.0 << 1)
    }

    #[inline]
    pub const fn negative(self) -> Literal {
        Literal((self.0 << 1) | 1)
    }

    pub const fn literal(self, negated: bool) -> Literal {
        Literal((self.0 << 1) | negated as u32)
    }
}

impl From<Var> for i64 {
    fn from(v: Var) -> i64 {
        v.dimacs() as i64
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.dimacs())
    }
}

/// A literal encoded as `2 * var + negated` with 0-based `var`. Negation
/// flips the low bit, so the encoding doubles as a node index in the
/// implication graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(into = "i64")]
pub struct Literal(u32);

impl Literal {
    #[inline]
    pub const fn from_code(code: u32) -> Self {
        Literal(code)
    }

    #[inline]
    pub const fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub const fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// Parses a non-zero DIMACS literal.
    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 || lit.unsigned_abs() > u32::MAX as u64 / 2 {
            return None;
        }
        let var = Var::from_dimacs(lit.unsigned_abs() as u32)?;
        Some(var.literal(lit < 0))
    }

    pub fn dimacs(self) -> i64 {
        let v = self.var().dimacs() as i64;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    /// Truth value under `assignment` (indexed by variable).
    #[inline]
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var().index()] != self.is_negated()
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;

    #[inline]
    fn not(self) -> Literal {
        Literal(self.0 ^ 1)
    }
}

impl From<Literal> for i64 {
    fn from(l: Literal) -> i64 {
        l.dimacs()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negated() {
            write!(f, "¬{}", self.var())
        } else {
            write!(f, "{}", self.var())
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FormulaError {
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("clause {clause}: variable {var} outside 1..={n}")]
    VariableOutOfRange { clause: usize, var: u32, n: usize },
    #[error("clause {clause}: variable {var} appears more than once")]
    RepeatedVariable { clause: usize, var: u32 },
    #[error("clause {clause} has {len} literals, expected {k}")]
    WrongArity { clause: usize, len: usize, k: usize },
}

/// A CNF formula over variables `1..=n`.
///
/// Clauses are stored back to back in one literal buffer. A formula built
/// through the checked constructors has no clause that repeats a variable;
/// when every clause has the same length `k`, [`Formula::arity`] reports it.
#[derive(Debug, Clone, Default)]
pub struct Formula {
    n: usize,
    lits: Vec<Literal>,
    ends: Vec<u32>,
    arity: Option<usize>,
}

impl Formula {
    /// An empty formula with a fixed clause width.
    pub fn with_arity(n: usize, k: usize) -> Self {
        Formula { n, lits: Vec::new(), ends: Vec::new(), arity: Some(k) }
    }

    /// Builds a formula and checks every model invariant: variables in
    /// range, no repeated variable within a clause, no empty clause.
    pub fn new<C: AsRef<[Literal]>>(n: usize, clauses: &[C]) -> Result<Self, FormulaError> {
        let mut f = Formula { n, ..Default::default() };
        for c in clauses {
            f.push_checked(c.as_ref())?;
        }
        f.arity = uniform_arity(&f);
        Ok(f)
    }

    /// Like [`Formula::new`] but only rejects empty clauses and variables
    /// out of range. Repeated literals and tautologies are kept.
    pub fn new_permissive<C: AsRef<[Literal]>>(
        n: usize,
        clauses: &[C],
    ) -> Result<Self, FormulaError> {
        let mut f = Formula { n, ..Default::default() };
        for (i, c) in clauses.iter().enumerate() {
            let c = c.as_ref();
            check_range(i, c, n)?;
            f.push_unchecked(c);
        }
        f.arity = uniform_arity(&f);
        Ok(f)
    }

    /// Convenience constructor from DIMACS-style integer clauses.
    pub fn from_dimacs_clauses(n: usize, clauses: &[&[i64]]) -> Result<Self, FormulaError> {
        let mut f = Formula { n, ..Default::default() };
        let mut buf = Vec::new();
        for (i, c) in clauses.iter().enumerate() {
            buf.clear();
            for &l in c.iter() {
                let lit = Literal::from_dimacs(l).ok_or(FormulaError::VariableOutOfRange {
                    clause: i,
                    var: l.unsigned_abs() as u32,
                    n,
                })?;
                buf.push(lit);
            }
            f.push_checked(&buf)?;
        }
        f.arity = uniform_arity(&f);
        Ok(f)
    }

    pub fn push_checked(&mut self, clause: &[Literal]) -> Result<(), FormulaError> {
        let idx = self.num_clauses();
        check_range(idx, clause, self.n)?;
        for (i, a) in clause.iter().enumerate() {
            if clause[..i].iter().any(|b| b.var() == a.var()) {
                return Err(FormulaError::RepeatedVariable { clause: idx, var: a.var().dimacs() });
            }
        }
        if self.arity.is_some_and(|k| k != clause.len()) {
            self.arity = None;
        }
        self.push_unchecked(clause);
        Ok(())
    }

    #[inline]
    pub(crate) fn push_unchecked(&mut self, clause: &[Literal]) {
        self.lits.extend_from_slice(clause);
        self.ends.push(self.lits.len() as u32);
    }

    pub(crate) fn clear_to(&mut self, n: usize, k: usize) {
        self.n = n;
        self.arity = Some(k);
        self.lits.clear();
        self.ends.clear();
    }

    pub(crate) fn reserve(&mut self, clauses: usize, lits: usize) {
        self.ends.reserve(clauses);
        self.lits.reserve(lits);
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_clauses(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    /// Common clause width, if every clause has the same number of literals.
    /// An empty formula keeps the width it was created with.
    pub fn arity(&self) -> Option<usize> {
        self.arity
    }

    #[inline]
    pub fn clause(&self, i: usize) -> &[Literal] {
        let start = if i == 0 { 0 } else { self.ends[i - 1] as usize };
        &self.lits[start..self.ends[i] as usize]
    }

    pub fn clauses(&self) -> impl ExactSizeIterator<Item = &[Literal]> + '_ {
        (0..self.ends.len()).map(move |i| self.clause(i))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    /// The first `m` clauses as a new formula.
    pub fn prefix(&self, m: usize) -> Formula {
        let m = m.min(self.num_clauses());
        let end = if m == 0 { 0 } else { self.ends[m - 1] as usize };
        Formula {
            n: self.n,
            lits: self.lits[..end].to_vec(),
            ends: self.ends[..m].to_vec(),
            arity: self.arity,
        }
    }

    /// Whether `assignment` (indexed by variable) satisfies every clause.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() >= self.n
            && self.clauses().all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    /// Renames every variable through `map` (old 0-based index to new
    /// 0-based index).
    pub fn relabel(&self, map: &[u32]) -> Formula {
        let lits = self
            .lits
            .iter()
            .map(|l| Var::new(map[l.var().index()]).literal(l.is_negated()))
            .collect();
        Formula { n: self.n, lits, ends: self.ends.clone(), arity: self.arity }
    }
}

/// Equality is on variable count and the clause sequence. The declared
/// width of an empty formula is not compared.
impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.ends == other.ends && self.lits == other.lits
    }
}

impl Eq for Formula {}

fn check_range(idx: usize, clause: &[Literal], n: usize) -> Result<(), FormulaError> {
    if clause.is_empty() {
        return Err(FormulaError::EmptyClause { clause: idx });
    }
    if let Some(l) = clause.iter().find(|l| l.var().index() >= n) {
        return Err(FormulaError::VariableOutOfRange { clause: idx, var: l.var().dimacs(), n });
    }
    Ok(())
}

fn uniform_arity(f: &Formula) -> Option<usize> {
    let mut it = f.clauses().map(<[Literal]>::len);
    let first = it.next()?;
    it.all(|l| l == first).then_some(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_encoding() {
        let x3 = Var::from_dimacs(3).unwrap();
        assert_eq!(x3.positive().code(), 4);
        assert_eq!(x3.negative().code(), 5);
        assert_eq!(!!x3.negative(), x3.negative());
        assert_eq!((!x3.positive()).var(), x3);
        assert_eq!(Literal::from_dimacs(-3), Some(x3.negative()));
        assert_eq!(x3.negative().dimacs(), -3);
        assert_eq!(Literal::from_dimacs(0), None);
    }

    #[test]
    fn checked_constructor_rejects_bad_clauses() {
        assert_eq!(
            Formula::from_dimacs_clauses(2, &[&[1, -1]]),
            Err(FormulaError::RepeatedVariable { clause: 0, var: 1 })
        );
        assert_eq!(
            Formula::from_dimacs_clauses(2, &[&[1, 3]]),
            Err(FormulaError::VariableOutOfRange { clause: 0, var: 3, n: 2 })
        );
        assert_eq!(
            Formula::from_dimacs_clauses(2, &[&[]]),
            Err(FormulaError::EmptyClause { clause: 0 })
        );
    }

    #[test]
    fn arity_tracking() {
        let f = Formula::from_dimacs_clauses(3, &[&[1, 2], &[-2, 3]]).unwrap();
        assert_eq!(f.arity(), Some(2));
        let g = Formula::from_dimacs_clauses(3, &[&[1, 2], &[-2, 3, 1]]).unwrap();
        assert_eq!(g.arity(), None);
        assert_eq!(g.clause(1).len(), 3);
        assert_eq!(g.prefix(1).num_clauses(), 1);
    }

    #[test]
    fn satisfaction() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, -2]]).unwrap();
        assert!(f.is_satisfied_by(&[true, true]));
        assert!(!f.is_satisfied_by(&[false, true]));
    }
}
