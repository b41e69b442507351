//! The three reward families of the colored-graph environment. Each is a
//! function of the isomorphism class only (checked by tests), so rewards can
//! be evaluated on any representative.

use thiserror::Error;

use crate::graphsym::ColoredGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewardKind {
    Counting,
    Neighbors,
    Cliques,
}

impl RewardKind {
    pub fn name(self) -> &'static str {
        match self {
            RewardKind::Counting => "counting",
            RewardKind::Neighbors => "neighbors",
            RewardKind::Cliques => "cliques",
        }
    }

    pub fn parse(s: &str) -> Option<RewardKind> {
        match s {
            "counting" => Some(RewardKind::Counting),
            "neighbors" => Some(RewardKind::Neighbors),
            "cliques" => Some(RewardKind::Cliques),
            _ => None,
        }
    }

    pub fn eval(self, g: &ColoredGraph, r0: f64) -> Result<f64, RewardError> {
        match self {
            RewardKind::Counting => reward_counting(g, r0),
            RewardKind::Neighbors => reward_neighbors(g, r0),
            RewardKind::Cliques => reward_cliques(g, r0),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RewardError {
    #[error("reward undefined on the empty graph")]
    EmptyGraph,
}

/// Color imbalance: `r0 + |#color-0 - #color-1|`.
pub fn reward_counting(g: &ColoredGraph, r0: f64) -> Result<f64, RewardError> {
    if g.n() == 0 {
        return Err(RewardError::EmptyGraph);
    }
    let n0 = g.colors().iter().filter(|&&c| c == 0).count() as i64;
    let n1 = g.colors().iter().filter(|&&c| c == 1).count() as i64;
    Ok(r0 + (n0 - n1).unsigned_abs() as f64)
}

/// Fraction of nodes whose opposite-color neighbor count is even
/// (zero counts as even): `r0 + #even / n`.
pub fn reward_neighbors(g: &ColoredGraph, r0: f64) -> Result<f64, RewardError> {
    let n = g.n();
    if n == 0 {
        return Err(RewardError::EmptyGraph);
    }
    let even = (0..n)
        .filter(|&v| {
            let opposite = g.neighbors(v).filter(|&u| g.color(u) != g.color(v)).count();
            opposite % 2 == 0
        })
        .count();
    Ok(r0 + even as f64 / n as f64)
}

/// Number of 4-node subsets that induce a K4 and carry at least three
/// same-colored nodes: `r0 + #such subsets`. Exhaustive scan; n ≤ 7 means
/// at most 35 subsets.
pub fn reward_cliques(g: &ColoredGraph, r0: f64) -> Result<f64, RewardError> {
    let n = g.n();
    if n == 0 {
        return Err(RewardError::EmptyGraph);
    }
    let mut count = 0u32;
    for a in 0..n {
        for b in (a + 1)..n {
            if !g.has_edge(a, b) {
                continue;
            }
            for c in (b + 1)..n {
                if !(g.has_edge(a, c) && g.has_edge(b, c)) {
                    continue;
                }
                for d in (c + 1)..n {
                    if g.has_edge(a, d) && g.has_edge(b, d) && g.has_edge(c, d) {
                        let same: usize = [a, b, c, d]
                            .iter()
                            .filter(|&&v| g.color(v) == 0)
                            .count();
                        if same >= 3 || same <= 1 {
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(r0 + f64::from(count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_examples() {
        let g = ColoredGraph::from_edges(vec![0, 0, 0, 1], &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(reward_counting(&g, 0.1).unwrap(), 0.1 + 2.0);
        let g = ColoredGraph::from_edges(vec![0, 0, 1, 1], &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(reward_counting(&g, 0.1).unwrap(), 0.1);
        let g = ColoredGraph::from_edges(vec![0; 7], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]);
        assert_eq!(reward_counting(&g, 0.1).unwrap(), 0.1 + 7.0);
        assert_eq!(reward_counting(&ColoredGraph::empty(), 0.1), Err(RewardError::EmptyGraph));
    }

    #[test]
    fn neighbors_examples() {
        let g = ColoredGraph::with_colors(vec![0]);
        assert_eq!(reward_neighbors(&g, 0.1).unwrap(), 1.1);
        let g = ColoredGraph::from_edges(vec![0, 1], &[(0, 1)]);
        assert_eq!(reward_neighbors(&g, 0.1).unwrap(), 0.1);
        let g = ColoredGraph::from_edges(vec![0, 0], &[(0, 1)]);
        assert_eq!(reward_neighbors(&g, 0.1).unwrap(), 1.1);
    }

    #[test]
    fn cliques_examples() {
        let tri = ColoredGraph::from_edges(vec![0; 3], &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(reward_cliques(&tri, 0.1).unwrap(), 0.1);
        let k4 = ColoredGraph::from_edges(
            vec![0, 0, 0, 1],
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        );
        assert_eq!(reward_cliques(&k4, 0.1).unwrap(), 1.1);
        let mut k5 = ColoredGraph::with_colors(vec![0; 5]);
        for u in 0..5 {
            for v in (u + 1)..5 {
                k5.add_edge(u, v);
            }
        }
        assert_eq!(reward_cliques(&k5, 0.1).unwrap(), 5.1);
    }
}
