//! Environment-agnostic GFlowNet machinery.
//!
//! Environments present each state's actions as *classes*: groups of
//! mutually equivalent concrete actions with a multiplicity. The policy
//! assigns one logit per class, and a class's probability is the summed
//! probability of its members (multiplicity-weighted softmax). An
//! environment without symmetries, or one running in its baseline mode,
//! simply presents singleton classes.

pub mod losses;
pub mod sampler;
pub mod train;

use thiserror::Error;

pub use losses::{class_log_policy, class_policy, db_loss, fm_interior_loss, fm_terminal_loss, logsumexp, tb_loss};
pub use sampler::{sample_trajectory, Step, Trajectory};
pub use train::{train, LossKind, StepRecord, TrainConfig};

#[derive(Debug, Error)]
pub enum GfnError {
    #[error("no legal actions: state is a malformed dead end")]
    NoLegalActions,
    #[error("depth cap exceeded ({0} transitions): broken environment DAG")]
    DepthCapExceeded(usize),
    #[error("reward must be positive, got {0}")]
    NonPositiveReward(f64),
    #[error("non-finite loss at step {step}: {value}")]
    NonFiniteLoss { step: usize, value: f64 },
    #[error("non-finite gradient")]
    NonFiniteGradient,
    #[error("empty flow list")]
    EmptyFlowList,
    #[error("stop sampled where illegal")]
    IllegalStop,
}

/// One forward action class of a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassDesc {
    pub multiplicity: u32,
    pub is_stop: bool,
}

/// A backward action class: concrete inverse actions grouped by the
/// environment's symmetry mode. Each link names a parent state, the
/// forward class index inside that parent that leads back to this state,
/// and how many concrete members share that link.
#[derive(Clone, Debug)]
pub struct BackwardClass<S> {
    pub links: Vec<(S, usize, u32)>,
}

impl<S> BackwardClass<S> {
    pub fn multiplicity(&self) -> u32 {
        self.links.iter().map(|l| l.2).sum()
    }
}

/// Result of applying a (non-stop) class member: the successor state and
/// the index of the successor's backward class that undoes the move.
#[derive(Clone, Debug)]
pub struct StepOutcome<S> {
    pub state: S,
    pub backward_class: usize,
}

/// A finite pointed-DAG environment presented at the action-class level.
///
/// Contract:
/// * the transition graph is a DAG graded by [`ClassEnv::grade`]
///   (successors have strictly larger grade);
/// * `classes` lists the stop class last whenever termination is legal;
/// * `reward` is positive wherever stop is legal;
/// * `backward` is empty exactly at the initial state.
pub trait ClassEnv {
    type State: Clone + std::fmt::Debug;

    fn initial_state(&self) -> Self::State;
    fn classes(&self, s: &Self::State) -> Vec<ClassDesc>;
    /// Applies member `member` of non-stop class `class`.
    fn step(&self, s: &Self::State, class: usize, member: u32) -> StepOutcome<Self::State>;
    fn backward(&self, s: &Self::State) -> Vec<BackwardClass<Self::State>>;
    fn reward(&self, s: &Self::State) -> f64;
    fn stop_legal(&self, s: &Self::State) -> bool {
        self.classes(s).iter().any(|c| c.is_stop)
    }
    /// Canonical identity bytes; states with equal keys are the same state.
    fn key(&self, s: &Self::State) -> Vec<u8>;
    /// Topological grade, strictly increasing along transitions.
    fn grade(&self, s: &Self::State) -> u64;
    /// Maximum feasible trajectory length (transitions incl. stop).
    fn max_len(&self) -> usize;

    // Encoding contract for dense function approximation.
    fn input_len(&self) -> usize;
    fn encode(&self, s: &Self::State) -> Vec<f64>;
    fn fwd_slots(&self) -> usize;
    fn bwd_slots(&self) -> usize;
    /// Per forward class: output slots of its concrete members.
    fn fwd_class_slots(&self, s: &Self::State) -> Vec<Vec<u32>>;
    fn bwd_class_slots(&self, s: &Self::State) -> Vec<Vec<u32>>;
}

/// The learnable object: per-class forward/backward logits, a log state
/// flow, and a log partition estimate. Evaluation takes `&mut self` so
/// tabular backends can materialize entries on first touch.
pub trait FlowModel<S> {
    fn forward_logits(&mut self, s: &S) -> Vec<f64>;
    fn backward_logits(&mut self, s: &S) -> Vec<f64>;
    fn log_state_flow(&mut self, s: &S) -> f64;
    fn log_z(&self) -> f64;

    fn accum_forward_grad(&mut self, s: &S, grad: &[f64]);
    fn accum_backward_grad(&mut self, s: &S, grad: &[f64]);
    fn accum_flow_grad(&mut self, s: &S, grad: f64);
    fn accum_log_z_grad(&mut self, grad: f64);
    /// Applies accumulated gradients and clears them.
    fn opt_step(&mut self) -> Result<(), GfnError>;
}
