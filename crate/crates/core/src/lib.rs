//! Coherent closure of colored complete directed graphs.
//!
//! A colored complete digraph on `n` vertices is stored as an `n x n` color
//! matrix ([`ColorMatrix`]). Its coherent closure is the coarsest refinement of
//! the coloring whose color classes form a coherent configuration. Two engines
//! compute it:
//!
//! * [`classical`]: exact Weisfeiler-Leman refinement over symbolic
//!   (noncommutative) matrix products. Output colors are canonical.
//! * [`probabilistic`]: Monte Carlo refinement where every color is replaced by
//!   random integers and the product becomes an exact integer matrix product
//!   ([`matmul`]). A single step doubles as a one-sided coherence test.
//!
//! [`axioms`] verifies coherence directly from intersection numbers and is kept
//! independent of the refinement code so that it can serve as an oracle.

pub mod axioms;
pub mod classical;
pub mod cli;
pub mod coloring;
mod error;
pub mod io;
pub mod matmul;
pub mod probabilistic;

pub use axioms::{make_fixture, verify_coherent, CoherenceReport, Fixture};
pub use classical::{classical_closure, classical_step, iteration_budget, noncommutative_product};
pub use coloring::{
    is_refinement, is_same_partition, rainbow_refine, refine_by, validate, ColorMatrix,
    PartitionView, RefinementOutcome,
};
pub use error::{Error, Result};
pub use matmul::{multiply, Backend, IntMatrix};
pub use probabilistic::{
    check_coherent, draw_substitution, error_bound, numeric_product, paired_closure,
    probabilistic_closure, probabilistic_step, RandomSubstitution, RunParams, StoppingPolicy,
    ValueMatrix,
};

/// Result of a closure computation by either engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WlResult {
    pub closure: ColorMatrix,
    /// Refinement steps executed after the rainbow preprocessing, including
    /// the final non-refining ones.
    pub iterations: usize,
    /// Class counts: `trace[0]` after rainbow preprocessing, `trace[i]` after step `i`.
    pub trace: Vec<usize>,
    pub stopping_reason: StoppingReason,
    /// Largest entry of any value matrix formed during the run (Monte Carlo only).
    pub max_value: Option<i64>,
}

impl WlResult {
    /// Number of steps that actually split a class.
    pub fn refining_iterations(&self) -> usize {
        self.trace.windows(2).filter(|w| w[1] > w[0]).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoppingReason {
    Stable,
    BudgetExhausted,
}

impl std::fmt::Display for StoppingReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StoppingReason::Stable => f.write_str("stable"),
            StoppingReason::BudgetExhausted => f.write_str("budget_exhausted"),
        }
    }
}
