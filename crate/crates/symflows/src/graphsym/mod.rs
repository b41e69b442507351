//! Colored-graph symmetry toolkit: exact canonical labeling and isomorphism
//! testing for small graphs, the WL / random-walk / edge-sum positional
//! encodings, and action partitioning by oracle or by PE.

pub mod bench;
pub mod canon;
pub mod classes;
pub mod graph;
pub mod pe;
pub mod rwpe;
pub mod wl;

pub use bench::{pe_benchmark, BenchReport};
pub use canon::{canonical_form, canonicalize, decode_canonical, is_isomorphic, CanonError};
pub use classes::{action_classes_oracle, action_classes_pe, apply_action, ActionClass, GraphAction};
pub use graph::{ColoredGraph, N_MAX};
pub use pe::{graph_pe, PeConfig, PeKey, PeLevel, WlSummary};
pub use rwpe::{edge_pe, rwpe_node, rwpe_with_values, RwOrientation};
pub use wl::{wl_node_signatures, wl_stable_signatures};
