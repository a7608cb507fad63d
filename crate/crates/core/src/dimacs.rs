//! DIMACS CNF reading and writing.

use std::fmt::Write as _;
use std::io;

use thiserror::Error;

use crate::formula::{Formula, FormulaError, Literal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimacsMode {
    /// Every clause must have pairwise distinct variables and, if `k` is
    /// given, exactly `k` literals.
    Strict { k: Option<usize> },
    /// Any non-empty clause is accepted, including repeated literals.
    Permissive,
}

#[derive(Debug, Error, PartialEq)]
pub enum DimacsError {
    #[error("line {line}: malformed header {text:?}, expected \"p cnf <vars> <clauses>\"")]
    MalformedHeader { line: usize, text: String },
    #[error("no \"p cnf\" header before the first clause")]
    MissingHeader,
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: bad token {token:?}")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {lit} is outside the declared {n} variables")]
    LiteralOutOfRange { line: usize, lit: i64, n: usize },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("last clause is not terminated by 0")]
    Unterminated,
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
    #[error("clause {}: {0}", .0.clause())]
    Invalid(FormulaError),
}

impl FormulaError {
    fn clause(&self) -> usize {
        match self {
            FormulaError::EmptyClause { clause }
            | FormulaError::VariableOutOfRange { clause, .. }
            | FormulaError::RepeatedVariable { clause, .. }
            | FormulaError::WrongArity { clause, .. } => *clause,
        }
    }
}

/// Serializes `f` as `p cnf n m` followed by one `0`-terminated line per
/// clause, in order.
pub fn to_dimacs(f: &Formula) -> String {
    let mut out = String::with_capacity(16 + f.literals().len() * 7);
    let _ = writeln!(out, "p cnf {} {}", f.num_vars(), f.num_clauses());
    for clause in f.clauses() {
        for l in clause {
            let _ = write!(out, "{} ", l.dimacs());
        }
        out.push_str("0\n");
    }
    out
}

pub fn write_dimacs(f: &Formula, mut w: impl io::Write) -> io::Result<()> {
    use std::io::Write as _;
    let mut w = io::BufWriter::new(&mut w);
    writeln!(w, "p cnf {} {}", f.num_vars(), f.num_clauses())?;
    for clause in f.clauses() {
        for l in clause {
            write!(w, "{} ", l.dimacs())?;
        }
        w.write_all(b"0\n")?;
    }
    w.flush()
}

pub fn from_dimacs(text: &str, mode: DimacsMode) -> Result<Formula, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();

    'lines: for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line: line_no });
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| DimacsError::MalformedHeader {
                line: line_no,
                text: line.to_string(),
            })?);
            continue;
        }
        let (n, _) = header.ok_or(DimacsError::MissingHeader)?;
        for token in line.split_whitespace() {
            if token.starts_with('%') {
                break 'lines;
            }
            let lit: i64 = token.parse().map_err(|_| DimacsError::BadToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(DimacsError::EmptyClause { line: line_no });
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            match Literal::from_dimacs(lit) {
                Some(l) if l.var().index() < n => current.push(l),
                _ => return Err(DimacsError::LiteralOutOfRange { line: line_no, lit, n }),
            }
        }
    }
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    let (n, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if declared != clauses.len() {
        return Err(DimacsError::ClauseCount { declared, found: clauses.len() });
    }
    let mut formula = match mode {
        DimacsMode::Strict { k } => {
            if let Some(k) = k {
                if let Some((i, c)) = clauses.iter().enumerate().find(|(_, c)| c.len() != k) {
                    return Err(DimacsError::Invalid(FormulaError::WrongArity {
                        clause: i,
                        len: c.len(),
                        k,
                    }));
                }
            }
            Formula::new(n, &clauses).map_err(DimacsError::Invalid)?
        }
        DimacsMode::Permissive => Formula::new_permissive(n, &clauses).map_err(DimacsError::Invalid)?,
    };
    if let (Some(k), true) = (strict_k(mode), formula.is_empty()) {
        formula = Formula::with_arity(n, k);
    }
    Ok(formula)
}

fn strict_k(mode: DimacsMode) -> Option<usize> {
    match mode {
        DimacsMode::Strict { k } => k,
        DimacsMode::Permissive => None,
    }
}
