//! Function-approximation backends behind the [`crate::gfn::FlowModel`]
//! interface: an exact tabular model keyed by canonical state encodings,
//! and a small dense network with hand-written reverse-mode gradients.

pub mod adam;
pub mod dense;
pub mod dense_flow;
pub mod tabular;

pub use adam::{AdamParams, AdamState};
pub use dense::{DenseGrads, DenseNet, NetError};
pub use dense_flow::DenseFlow;
pub use tabular::TabularFlow;
