//! Clause-drawing non-uniform random 2-SAT: generation, solving, witness
//! detection, threshold prediction and Monte Carlo validation.

pub mod alias;
pub mod analysis;
pub mod dimacs;
pub mod dist;
pub mod formula;
pub mod generator;
pub mod rng;
pub mod scc;
pub mod solver;
pub mod witness;
pub mod xlab;

pub use analysis::{predict_threshold, Regime, ThresholdReport};
pub use dimacs::{from_dimacs, to_dimacs, DimacsMode};
pub use dist::{instantiate, Distribution, EnsembleSpec, Family};
pub use formula::{Formula, Literal, Var};
pub use generator::{sample_formula, GeneratorConfig};
pub use solver::{solve2, solve_brute, SolveResult, Status};
