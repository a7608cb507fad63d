//! Structural sub-formulas of random 2-CNFs.
//!
//! * bicycles: implication chains over distinct variables whose two ends
//!   point back into the chain; every unsatisfiable 2-CNF has one;
//! * snakes: `2t-1` literals whose `2t` associated clauses are always
//!   unsatisfiable;
//! * full-sign cores: `k` variables carrying all `2^k` sign patterns;
//! * the variable-variable incidence graph.

mod bicycle;
mod core;
mod snake;
mod vig;

use thiserror::Error;

pub use self::bicycle::{find_bicycle, Bicycle, DEFAULT_T_MAX};
pub use self::core::{full_sign_core, MAX_CORE_ARITY};
pub use self::snake::{
    count_snake_occurrences, count_snake_occurrences_with_budget, snake_clauses, Snake, SnakeCensus,
    SnakeOccurrence, DEFAULT_CENSUS_BUDGET, MAX_CENSUS_T,
};
pub use self::vig::{build_vig, Vig};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("expected a 2-CNF, found clause width {found:?}")]
    Arity { found: Option<usize> },
    #[error("invalid snake: {reason}")]
    InvalidSnake { reason: String },
    #[error("snake census for t = {t} exceeds the enumeration budget ({budget} steps, t <= {MAX_CENSUS_T})")]
    Budget { t: usize, budget: u64 },
}

pub(crate) fn require_two_cnf(f: &crate::Formula) -> Result<(), WitnessError> {
    if f.is_empty() || f.arity() == Some(2) {
        Ok(())
    } else {
        Err(WitnessError::Arity { found: f.arity() })
    }
}
