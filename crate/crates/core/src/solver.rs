//! 2-SAT decision with certificates, and an exhaustive oracle.

use std::collections::VecDeque;

use thiserror::Error;

use crate::formula::{Formula, Literal, Var};
use crate::scc::{ImplicationGraph, Tarjan};

/// Largest variable count [`solve_brute`] accepts.
pub const BRUTE_FORCE_MAX_VARS: usize = 25;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("expected a 2-CNF, found clause width {found:?}")]
    Arity { found: Option<usize> },
    #[error("{n} variables exceed the exhaustive search limit of {BRUTE_FORCE_MAX_VARS}")]
    TooLarge { n: usize },
    #[error("extracted assignment does not satisfy clause {clause}")]
    CertificateMismatch { clause: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Sat,
    Unsat,
}

impl Status {
    /// Conventional SAT-competition exit code.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Sat => 10,
            Status::Unsat => 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// `assignment[v]` is the value of variable `v` (0-based).
    Sat { assignment: Vec<bool> },
    /// `witness`, when present, is a variable whose two literals share a
    /// strongly connected component of the implication graph.
    Unsat { witness: Option<Var> },
}

impl SolveResult {
    pub fn status(&self) -> Status {
        match self {
            SolveResult::Sat { .. } => Status::Sat,
            SolveResult::Unsat { .. } => Status::Unsat,
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat { .. })
    }

    pub fn assignment(&self) -> Option<&[bool]> {
        match self {
            SolveResult::Sat { assignment } => Some(assignment),
            SolveResult::Unsat { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<Var> {
        match self {
            SolveResult::Unsat { witness } => *witness,
            SolveResult::Sat { .. } => None,
        }
    }
}

fn check_two_cnf(f: &Formula) -> Result<(), SolveError> {
    if f.is_empty() || f.arity() == Some(2) {
        Ok(())
    } else {
        Err(SolveError::Arity { found: f.arity() })
    }
}

/// Reusable 2-SAT solver; keeps its graph and SCC buffers across calls.
#[derive(Debug, Default, Clone)]
pub struct TwoSatSolver {
    graph: ImplicationGraph,
    tarjan: Tarjan,
}

impl TwoSatSolver {
    pub fn new() -> Self {
        Self::default()
    }

    fn analyse(&mut self, f: &Formula) -> Result<Option<Var>, SolveError> {
        check_two_cnf(f)?;
        self.graph.rebuild(f);
        self.tarjan.run(&self.graph);
        let comp = self.tarjan.components();
        Ok((0..f.num_vars() as u32)
            .map(Var::new)
            .find(|v| comp[v.positive().code() as usize] == comp[v.negative().code() as usize]))
    }

    /// Status only; skips assignment extraction.
    pub fn is_satisfiable(&mut self, f: &Formula) -> Result<bool, SolveError> {
        Ok(self.analyse(f)?.is_none())
    }

    pub fn solve(&mut self, f: &Formula) -> Result<SolveResult, SolveError> {
        if let Some(v) = self.analyse(f)? {
            return Ok(SolveResult::Unsat { witness: Some(v) });
        }
        // A literal is true when its component comes later in topological
        // order, i.e. completed earlier in Tarjan's pass.
        let assignment: Vec<bool> = (0..f.num_vars() as u32)
            .map(|v| {
                let v = Var::new(v);
                self.tarjan.component(v.positive()) < self.tarjan.component(v.negative())
            })
            .collect();
        if let Some(clause) = first_falsified(f, &assignment) {
            return Err(SolveError::CertificateMismatch { clause });
        }
        Ok(SolveResult::Sat { assignment })
    }
}

/// Decides a 2-CNF in `O(n + m)`. SAT answers carry a checked assignment;
/// UNSAT answers carry a contradictory variable.
pub fn solve2(f: &Formula) -> Result<SolveResult, SolveError> {
    TwoSatSolver::new().solve(f)
}

/// Tries all `2^n` assignments. Works for any clause width.
pub fn solve_brute(f: &Formula) -> Result<SolveResult, SolveError> {
    let n = f.num_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(SolveError::TooLarge { n });
    }
    // Clause satisfied by `a` iff (a & pos) | (!a & neg) != 0.
    let masks: Vec<(u32, u32)> = f
        .clauses()
        .map(|c| {
            c.iter().fold((0, 0), |(pos, neg), l| {
                let bit = 1u32 << l.var().index();
                if l.is_negated() {
                    (pos, neg | bit)
                } else {
                    (pos | bit, neg)
                }
            })
        })
        .collect();
    let found = (0u32..1 << n).find(|&a| masks.iter().all(|&(pos, neg)| (a & pos) | (!a & neg) != 0));
    Ok(match found {
        Some(a) => SolveResult::Sat { assignment: (0..n).map(|i| a >> i & 1 == 1).collect() },
        None => SolveResult::Unsat { witness: None },
    })
}

fn first_falsified(f: &Formula, assignment: &[bool]) -> Option<usize> {
    f.clauses().position(|c| !c.iter().any(|l| l.eval(assignment)))
}

/// Checks a SAT certificate clause by clause.
pub fn verify_assignment(f: &Formula, assignment: &[bool]) -> bool {
    assignment.len() == f.num_vars() && first_falsified(f, assignment).is_none()
}

/// Checks an UNSAT certificate without Tarjan: `v` and `¬v` must reach each
/// other in the implication graph, found by breadth-first search.
pub fn verify_unsat_witness(f: &Formula, v: Var) -> bool {
    if check_two_cnf(f).is_err() || v.index() >= f.num_vars() {
        return false;
    }
    let mut adj = vec![Vec::new(); 2 * f.num_vars()];
    for c in f.clauses() {
        adj[(!c[0]).code() as usize].push(c[1]);
        adj[(!c[1]).code() as usize].push(c[0]);
    }
    reaches(&adj, v.positive(), v.negative()) && reaches(&adj, v.negative(), v.positive())
}

fn reaches(adj: &[Vec<Literal>], from: Literal, to: Literal) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([from]);
    seen[from.code() as usize] = true;
    while let Some(u) = queue.pop_front() {
        if u == to {
            return true;
        }
        for &w in &adj[u.code() as usize] {
            if !std::mem::replace(&mut seen[w.code() as usize], true) {
                queue.push_back(w);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn formula(n: usize, clauses: &[&[i64]]) -> Formula {
        Formula::from_dimacs_clauses(n, clauses).unwrap()
    }

    #[test]
    fn single_clause_is_sat() {
        let f = formula(2, &[&[1, 2]]);
        let r = solve2(&f).unwrap();
        assert!(verify_assignment(&f, r.assignment().unwrap()));
    }

    #[test]
    fn full_sign_core_is_unsat() {
        let f = formula(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]);
        let r = solve2(&f).unwrap();
        let w = r.witness().unwrap();
        assert!(w.dimacs() == 1 || w.dimacs() == 2);
        assert!(verify_unsat_witness(&f, w));
        assert_eq!(solve_brute(&f).unwrap().status(), Status::Unsat);
    }

    #[test]
    fn snake_formula_is_unsat() {
        let f = formula(3, &[&[2, 1], &[-1, 2], &[-2, 3], &[-3, -2]]);
        let r = solve2(&f).unwrap();
        assert_eq!(r.status(), Status::Unsat);
        assert!(verify_unsat_witness(&f, r.witness().unwrap()));
    }

    #[test]
    fn empty_formula() {
        let f = Formula::with_arity(3, 2);
        assert!(solve2(&f).unwrap().is_sat());
        assert!(solve_brute(&f).unwrap().is_sat());
        assert!(solve_brute(&Formula::default()).unwrap().is_sat());
    }

    #[test]
    fn arity_and_size_errors() {
        let f = formula(3, &[&[1, 2, 3]]);
        assert_eq!(solve2(&f), Err(SolveError::Arity { found: Some(3) }));
        assert_eq!(solve_brute(&f).unwrap().status(), Status::Sat);
        let big = Formula::with_arity(26, 2);
        assert_eq!(solve_brute(&big), Err(SolveError::TooLarge { n: 26 }));
    }

    #[test]
    fn witness_rejected_when_not_contradictory() {
        let f = formula(2, &[&[1, 2]]);
        assert!(!verify_unsat_witness(&f, Var::new(0)));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Sat.exit_code(), 10);
        assert_eq!(Status::Unsat.exit_code(), 20);
    }
}
