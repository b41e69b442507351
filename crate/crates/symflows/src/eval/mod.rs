//! Exact evaluation: full state-space enumeration, the ground-truth
//! distribution `p(x) ∝ R(x)`, the learned terminal distribution by an
//! exact dynamic-programming sweep, and the L1 / JS / average-reward
//! metrics.

pub mod dp;
pub mod index;
pub mod metrics;

use thiserror::Error;

pub use dp::{ground_truth, model_distribution};
pub use index::{enumerate_states, StateIndex};
pub use metrics::{empirical_distribution, js_divergence, l1_distance, EmpiricalWindow};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("state budget exceeded ({0} states)")]
    BudgetExceeded(usize),
    #[error("distribution length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("unknown state key")]
    UnknownKey,
    #[error("empty sample window")]
    EmptyWindow,
    #[error("environment error: {0}")]
    Env(#[from] crate::gfn::GfnError),
}

/// Dense probability vector over state indices; terminal mass sits at the
/// stop-legal states and sums to 1.
pub type DistributionTable = Vec<f64>;
