//! Fast closure of the graph state space: breadth-first expansion from the
//! empty graph over raw actions with canonical-form deduplication, without
//! any action-class bookkeeping. Used by the PE benchmark and the state
//! count reconciliation.

use std::collections::HashMap;

use crate::graphsym::classes::apply_action;
use crate::graphsym::{canonicalize, CanonError, ColoredGraph, GraphAction};

use super::env::graph_legal_actions;

/// All reachable canonical states (the empty graph first, then by
/// breadth-first discovery order).
pub fn enumerate_graphs(n_max: usize, n_colors: usize) -> Result<Vec<ColoredGraph>, CanonError> {
    let mut states: Vec<ColoredGraph> = vec![ColoredGraph::empty()];
    let mut seen: HashMap<Vec<u8>, ()> = HashMap::new();
    seen.insert(crate::graphsym::canonical_form(&states[0])?, ());
    let mut head = 0;
    while head < states.len() {
        let g = states[head].clone();
        head += 1;
        for a in graph_legal_actions(&g, n_max, n_colors) {
            let Some(raw) = apply_action(&g, &a) else { continue };
            let (succ, _) = canonicalize(&raw)?;
            let key = crate::graphsym::canonical_form(&succ)?;
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                e.insert(());
                states.push(succ);
            }
        }
    }
    Ok(states)
}

/// Per-node-count tally of connected states (index = node count).
pub fn count_by_size(states: &[ColoredGraph], n_max: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n_max + 1];
    for g in states {
        counts[g.n()] += 1;
    }
    counts
}

/// Counts of all (not necessarily connected) colored graphs per node count,
/// derived from the connected counts by multiset composition: a graph is a
/// multiset of connected components.
pub fn all_graph_counts(connected: &[u64], n_max: usize) -> Vec<u64> {
    // dp over component sizes; for c_k distinct components of size k, the
    // number of multisets using j of them is C(c_k + j - 1, j)
    let mut dp = vec![0u64; n_max + 1];
    dp[0] = 1;
    for k in 1..=n_max {
        let c = connected[k];
        let mut next = vec![0u64; n_max + 1];
        for total in 0..=n_max {
            let mut j = 0;
            while j * k <= total {
                let ways = multiset_coefficient(c, j as u64);
                next[total] += dp[total - j * k] * ways;
                j += 1;
            }
        }
        dp = next;
    }
    dp
}

fn multiset_coefficient(n: u64, k: u64) -> u64 {
    // C(n + k - 1, k)
    if k == 0 {
        return 1;
    }
    let mut num = 1u64;
    for i in 0..k {
        num = num * (n + k - 1 - i) / (i + 1);
    }
    num
}

/// All legal non-stop actions of a state under the environment's defaults;
/// the action universe of the PE benchmark.
pub fn benchmark_actions(n_max: usize, n_colors: usize) -> impl Fn(&ColoredGraph) -> Vec<GraphAction> {
    move |g| {
        graph_legal_actions(g, n_max, n_colors)
            .into_iter()
            .filter(|a| !matches!(a, GraphAction::Stop))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_spaces() {
        // n_max=1: empty, red, blue
        assert_eq!(enumerate_graphs(1, 2).unwrap().len(), 3);
        // n_max=2: empty, 2 singles, edges rr / rb / bb
        assert_eq!(enumerate_graphs(2, 2).unwrap().len(), 6);
        // n_max=3: + P3 center/end colorings (6) and triangles (4)
        assert_eq!(enumerate_graphs(3, 2).unwrap().len(), 16);
    }

    #[test]
    fn monochromatic_counts_match_known_connected_graph_counts() {
        // connected unlabeled graphs on 1..6 nodes: 1, 1, 2, 6, 21, 112
        let states = enumerate_graphs(6, 1).unwrap();
        let counts = count_by_size(&states, 6);
        assert_eq!(&counts[1..], &[1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn composition_recovers_all_unlabeled_graphs() {
        // all unlabeled graphs on 0..6 nodes: 1, 1, 2, 4, 11, 34, 156
        let states = enumerate_graphs(6, 1).unwrap();
        let connected = count_by_size(&states, 6);
        let all = all_graph_counts(&connected, 6);
        assert_eq!(all, vec![1, 1, 2, 4, 11, 34, 156]);
    }
}
