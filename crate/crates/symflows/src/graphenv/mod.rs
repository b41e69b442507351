//! The colored-graph building environment with three reward families and
//! vanilla / oracle / PE action-symmetry modes.

pub mod env;
pub mod reward;
pub mod space;

pub use env::{graph_backward_moves, graph_legal_actions, BackwardMove, GraphEnv, GraphEnvConfig, GraphSymmetry};
pub use reward::{reward_cliques, reward_counting, reward_neighbors, RewardError, RewardKind};
pub use space::enumerate_graphs;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfn::ClassEnv;
    use crate::graphsym::{canonical_form, ColoredGraph, GraphAction};

    fn env(symmetry: GraphSymmetry) -> GraphEnv {
        GraphEnv::new(GraphEnvConfig { symmetry, ..GraphEnvConfig::default() })
    }

    #[test]
    fn legal_action_counts() {
        let e = env(GraphSymmetry::Oracle);
        assert_eq!(e.actions(&ColoredGraph::empty()).len(), 2);
        assert_eq!(e.actions(&ColoredGraph::with_colors(vec![0])).len(), 3);
        let tri = ColoredGraph::from_edges(vec![0; 3], &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(e.actions(&tri).len(), 7);
    }

    #[test]
    fn step_examples() {
        let e = env(GraphSymmetry::Oracle);
        // empty + first node
        let s0 = e.initial_state();
        let classes = e.classes(&s0);
        assert_eq!(classes.len(), 2);
        assert!(classes.iter().all(|c| !c.is_stop));
        let red = e.step(&s0, 0, 0).state;
        assert_eq!(red.n(), 1);

        // triangle + pendant = paw
        let tri = ColoredGraph::from_edges(vec![0; 3], &[(0, 1), (1, 2), (0, 2)]);
        let classes = e.classes(&tri);
        // add-node (two colors) + stop: no add-edge actions on K3
        assert_eq!(classes.len(), 3);
        assert_eq!(classes[0].multiplicity, 3);
        let paw = e.step(&tri, 0, 0).state;
        assert_eq!(paw.n(), 4);
        assert_eq!(paw.edge_count(), 4);

        // P3 + closing edge = triangle
        let p3 = ColoredGraph::from_edges(vec![0; 3], &[(0, 1), (1, 2)]);
        let acts = e.actions(&p3);
        assert!(acts.contains(&GraphAction::AddEdge { u: 0, v: 2 }));
    }

    #[test]
    fn paw_backward_classes() {
        let e = env(GraphSymmetry::Oracle);
        let paw_raw = ColoredGraph::from_edges(vec![0; 4], &[(0, 1), (1, 2), (1, 3), (2, 3)]);
        let (paw, _) = crate::graphsym::canonicalize(&paw_raw).unwrap();
        let backward = e.backward(&paw);
        // classes: remove pendant (-> triangle, mult 1), remove the edge
        // opposite the pendant (-> star, mult 1), remove a hub edge (-> P4, mult 2)
        let mut mults: Vec<u32> = backward.iter().map(|b| b.multiplicity()).collect();
        mults.sort_unstable();
        assert_eq!(mults, vec![1, 1, 2]);
        let tri_key = canonical_form(&ColoredGraph::from_edges(vec![0; 3], &[(0, 1), (1, 2), (0, 2)])).unwrap();
        let pendant_class = backward
            .iter()
            .filter(|b| canonical_form(&b.links[0].0).unwrap() == tri_key)
            .count();
        assert_eq!(pendant_class, 1);
    }

    #[test]
    fn single_node_backward_reaches_empty() {
        let e = env(GraphSymmetry::Oracle);
        let s = ColoredGraph::with_colors(vec![1]);
        let backward = e.backward(&s);
        assert_eq!(backward.len(), 1);
        assert_eq!(backward[0].links[0].0.n(), 0);
    }

    #[test]
    fn c4_backward_single_edge_class() {
        let e = env(GraphSymmetry::Oracle);
        let c4_raw = ColoredGraph::from_edges(vec![0; 4], &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        let (c4, _) = crate::graphsym::canonicalize(&c4_raw).unwrap();
        let backward = e.backward(&c4);
        assert_eq!(backward.len(), 1);
        assert_eq!(backward[0].multiplicity(), 4);
        assert_eq!(backward[0].links.len(), 1);
        let p4_key = canonical_form(&ColoredGraph::from_edges(vec![0; 4], &[(0, 1), (1, 2), (2, 3)])).unwrap();
        assert_eq!(canonical_form(&backward[0].links[0].0).unwrap(), p4_key);
    }

    #[test]
    fn step_backward_correspondence_round_trips() {
        // for every forward step, the recorded backward class leads back to
        // the source state
        for symmetry in [GraphSymmetry::Vanilla, GraphSymmetry::Oracle, GraphSymmetry::Pe(Default::default())] {
            let name = symmetry.name();
            let e = GraphEnv::new(GraphEnvConfig { n_max: 4, symmetry, ..GraphEnvConfig::default() });
            let mut stack = vec![e.initial_state()];
            let mut seen = std::collections::HashSet::new();
            while let Some(s) = stack.pop() {
                let key = e.key(&s);
                if !seen.insert(key.clone()) {
                    continue;
                }
                for (c, class) in e.classes(&s).iter().enumerate() {
                    if class.is_stop {
                        continue;
                    }
                    for m in 0..class.multiplicity {
                        let out = e.step(&s, c, m);
                        let back = e.backward(&out.state);
                        let link_keys: Vec<Vec<u8>> = back[out.backward_class]
                            .links
                            .iter()
                            .map(|(p, _, _)| e.key(p))
                            .collect();
                        assert!(link_keys.contains(&key), "{name} step not invertible");
                        stack.push(out.state);
                    }
                }
            }
        }
    }
}
