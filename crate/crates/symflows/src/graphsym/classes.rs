//! Partitioning a state's actions into classes of mutually equivalent
//! ("isomorphic") actions, either exactly via canonical forms of the
//! successor graphs or approximately via positional encodings.

use std::collections::HashMap;

use super::canon::{canonical_form, CanonError};
use super::graph::ColoredGraph;
use super::pe::{compute_features, graph_pe_from_features, node_key, pair_key, tagged, PeConfig, PeKey, PeLevel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphAction {
    /// Place the first node (only legal in the empty graph).
    AddFirstNode { color: u8 },
    /// Append a new node of `color` and connect it to `attach`.
    AddNode { attach: usize, color: u8 },
    /// Connect the existing non-adjacent pair `u < v`.
    AddEdge { u: usize, v: usize },
    Stop,
}

/// A group of mutually equivalent actions, stored as indices into the
/// action list that produced it. `members[0]` is the representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionClass {
    pub members: Vec<usize>,
}

impl ActionClass {
    pub fn multiplicity(&self) -> u32 {
        self.members.len() as u32
    }

    pub fn representative<'a>(&self, actions: &'a [GraphAction]) -> &'a GraphAction {
        &actions[self.members[0]]
    }
}

/// Successor graph of a structural action; `Stop` has no successor.
pub fn apply_action(g: &ColoredGraph, a: &GraphAction) -> Option<ColoredGraph> {
    match *a {
        GraphAction::AddFirstNode { color } => {
            debug_assert_eq!(g.n(), 0);
            Some(ColoredGraph::with_colors(vec![color]))
        }
        GraphAction::AddNode { attach, color } => {
            let mut h = g.clone();
            let v = h.add_node(color);
            h.add_edge(attach, v);
            Some(h)
        }
        GraphAction::AddEdge { u, v } => {
            let mut h = g.clone();
            h.add_edge(u, v);
            Some(h)
        }
        GraphAction::Stop => None,
    }
}

fn group_by_key<K: std::hash::Hash + Eq>(keys: Vec<(usize, K)>) -> Vec<ActionClass> {
    let mut class_of: HashMap<K, usize> = HashMap::new();
    let mut classes: Vec<ActionClass> = Vec::new();
    for (idx, key) in keys {
        match class_of.entry(key) {
            std::collections::hash_map::Entry::Occupied(e) => classes[*e.get()].members.push(idx),
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(classes.len());
                classes.push(ActionClass { members: vec![idx] });
            }
        }
    }
    classes
}

/// Exact partition: two actions share a class iff their successor graphs
/// are isomorphic. `Stop` is always its own class.
pub fn action_classes_oracle(
    g: &ColoredGraph,
    actions: &[GraphAction],
) -> Result<Vec<ActionClass>, CanonError> {
    let mut keys = Vec::with_capacity(actions.len());
    for (idx, a) in actions.iter().enumerate() {
        let key = match apply_action(g, a) {
            Some(succ) => Some(canonical_form(&succ)?),
            None => None,
        };
        keys.push((idx, key));
    }
    Ok(group_by_key(keys))
}

/// Approximate partition by positional encodings. At graph level each
/// action is keyed by the PE of its successor; at node/edge level actions
/// are keyed by node- and pair-level PEs of the original graph, which
/// avoids touching the successors at all.
pub fn action_classes_pe(
    g: &ColoredGraph,
    actions: &[GraphAction],
    cfg: &PeConfig,
) -> Vec<ActionClass> {
    let keys: Vec<(usize, Option<PeKey>)> = match cfg.level {
        PeLevel::Graph => actions
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                let key = apply_action(g, a).map(|succ| {
                    let kind = match a {
                        GraphAction::AddFirstNode { .. } => 0,
                        GraphAction::AddNode { .. } => 1,
                        GraphAction::AddEdge { .. } => 2,
                        GraphAction::Stop => unreachable!(),
                    };
                    tagged(kind, graph_pe(g, cfg, &succ))
                });
                (idx, key)
            })
            .collect(),
        PeLevel::NodeEdge => {
            let feats = compute_features(g, cfg);
            actions
                .iter()
                .enumerate()
                .map(|(idx, a)| {
                    let key = match *a {
                        GraphAction::AddFirstNode { color } => Some(tagged(0, vec![u64::from(color)])),
                        GraphAction::AddNode { attach, color } => {
                            let mut k = node_key(cfg, &feats, attach);
                            k.push(u64::from(color));
                            Some(tagged(1, k))
                        }
                        GraphAction::AddEdge { u, v } => Some(tagged(2, pair_key(cfg, &feats, u, v))),
                        GraphAction::Stop => None,
                    };
                    (idx, key)
                })
                .collect()
        }
    };
    group_by_key(keys)
}

fn graph_pe(_parent: &ColoredGraph, cfg: &PeConfig, succ: &ColoredGraph) -> PeKey {
    let feats = compute_features(succ, cfg);
    graph_pe_from_features(succ, cfg, &feats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> ColoredGraph {
        ColoredGraph::from_edges(vec![0; 3], &[(0, 1), (1, 2), (0, 2)])
    }

    #[test]
    fn triangle_add_node_single_class() {
        let acts: Vec<GraphAction> =
            (0..3).map(|attach| GraphAction::AddNode { attach, color: 0 }).collect();
        let classes = action_classes_oracle(&triangle(), &acts).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].multiplicity(), 3);
    }

    #[test]
    fn single_node_color_choices_distinct() {
        let g = ColoredGraph::with_colors(vec![0]);
        let acts = vec![
            GraphAction::AddNode { attach: 0, color: 0 },
            GraphAction::AddNode { attach: 0, color: 1 },
        ];
        let classes = action_classes_oracle(&g, &acts).unwrap();
        assert_eq!(classes.len(), 2);
        for cfg in ["wl", "rw", "rw+edge", "wl+rw+edge"] {
            let cfg = PeConfig::from_components(cfg).unwrap();
            for level in [PeLevel::Graph, PeLevel::NodeEdge] {
                let cfg = PeConfig { level, ..cfg.clone() };
                assert_eq!(action_classes_pe(&g, &acts, &cfg).len(), 2);
            }
        }
    }

    #[test]
    fn c4_diagonals_one_class() {
        let c4 = ColoredGraph::from_edges(vec![0; 4], &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        let acts = vec![GraphAction::AddEdge { u: 0, v: 2 }, GraphAction::AddEdge { u: 1, v: 3 }];
        let classes = action_classes_oracle(&c4, &acts).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].multiplicity(), 2);
    }

    #[test]
    fn triangle_pe_matches_oracle() {
        let acts: Vec<GraphAction> =
            (0..3).map(|attach| GraphAction::AddNode { attach, color: 0 }).collect();
        let cfg = PeConfig { level: PeLevel::Graph, ..PeConfig::from_components("rw+edge").unwrap() };
        let classes = action_classes_pe(&triangle(), &acts, &cfg);
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].multiplicity(), 3);
    }

    #[test]
    fn stop_isolated() {
        let g = ColoredGraph::with_colors(vec![0]);
        let acts = vec![GraphAction::AddNode { attach: 0, color: 0 }, GraphAction::Stop];
        let classes = action_classes_oracle(&g, &acts).unwrap();
        assert_eq!(classes.len(), 2);
        let cfg = PeConfig::default();
        assert_eq!(action_classes_pe(&g, &acts, &cfg).len(), 2);
    }
}
