//! Symmetry-aware GFlowNet training and exact evaluation.
//!
//! The crate has three layers:
//!
//! * environment-agnostic GFlowNet machinery ([`gfn`]) with tabular and
//!   dense-network function approximation ([`approx`]);
//! * two environments — the D-dimensional hypergrid ([`hypergrid`]) with
//!   state symmetrization by group averaging or canonical coordinates, and
//!   a colored-graph builder ([`graphenv`]) whose action symmetries are
//!   detected exactly ([`graphsym::canon`]) or approximated by positional
//!   encodings ([`graphsym::pe`]);
//! * exact evaluation ([`eval`]): full state enumeration, the learned
//!   terminal distribution by dynamic programming, and L1/JS/avg-reward
//!   metrics.

pub mod approx;
pub mod checkpoint;
pub mod config;
pub mod csvout;
pub mod eval;
pub mod gfn;
pub mod graphenv;
pub mod graphsym;
pub mod hypergrid;
pub mod runner;
pub mod seeds;
