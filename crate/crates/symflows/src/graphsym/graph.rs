//! Small undirected colored graphs stored as per-node adjacency bitmasks.
//!
//! Everything in this crate that reasons about isomorphism works on graphs
//! of at most [`N_MAX`] nodes, which keeps brute-force canonicalization
//! exact and fast.

use std::fmt;

/// Hard cap for exact canonicalization (brute force over permutations).
pub const N_MAX: usize = 10;

/// Undirected simple graph with a color id per node. No self-loops,
/// no multi-edges; `adj[i]` has bit `j` set iff `i` and `j` are adjacent.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ColoredGraph {
    colors: Vec<u8>,
    adj: Vec<u16>,
}

impl ColoredGraph {
    pub fn empty() -> Self {
        ColoredGraph { colors: Vec::new(), adj: Vec::new() }
    }

    /// Graph with `n` isolated nodes of the given colors.
    pub fn with_colors(colors: Vec<u8>) -> Self {
        let n = colors.len();
        ColoredGraph { colors, adj: vec![0; n] }
    }

    /// Build from a color list and an edge list; panics on out-of-range
    /// endpoints or self-loops (test/construction convenience).
    pub fn from_edges(colors: Vec<u8>, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::with_colors(colors);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn color(&self, v: usize) -> u8 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u] & (1 << v) != 0
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n() && v < self.n(), "bad edge ({u},{v})");
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u] &= !(1 << v);
        self.adj[v] &= !(1 << u);
    }

    /// Appends an isolated node, returning its id.
    pub fn add_node(&mut self, color: u8) -> usize {
        self.colors.push(color);
        self.adj.push(0);
        self.colors.len() - 1
    }

    /// Removes node `v`, relabeling every node above it down by one.
    pub fn remove_node(&self, v: usize) -> ColoredGraph {
        let n = self.n();
        let mut colors = Vec::with_capacity(n - 1);
        let mut adj = Vec::with_capacity(n - 1);
        for i in (0..n).filter(|&i| i != v) {
            colors.push(self.colors[i]);
            let mut row = 0u16;
            for j in (0..n).filter(|&j| j != v) {
                if self.has_edge(i, j) {
                    let jj = if j > v { j - 1 } else { j };
                    row |= 1 << jj;
                }
            }
            adj.push(row);
        }
        ColoredGraph { colors, adj }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = self.adj[v];
        (0..self.n()).filter(move |j| mask & (1 << j) != 0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n() {
            for v in (u + 1)..self.n() {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Pairs `u < v` that are currently non-adjacent.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n() {
            for v in (u + 1)..self.n() {
                if !self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// True for the empty graph and any connected graph.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen: u16 = 1;
        let mut frontier: u16 = 1;
        while frontier != 0 {
            let mut next = 0u16;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.adj[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen.count_ones() as usize == n
    }

    /// Whether the graph stays connected after deleting edge `(u, v)`.
    pub fn connected_without_edge(&self, u: usize, v: usize) -> bool {
        let mut g = self.clone();
        g.remove_edge(u, v);
        g.is_connected()
    }

    /// Relabels nodes so that new node `i` is old node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> ColoredGraph {
        let n = self.n();
        assert_eq!(perm.len(), n);
        let mut g = Self::with_colors(perm.iter().map(|&p| self.colors[p]).collect());
        for i in 0..n {
            for j in (i + 1)..n {
                if self.has_edge(perm[i], perm[j]) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }
}

impl fmt::Debug for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColoredGraph(colors={:?}, edges={:?})", self.colors, self.edges())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connectivity() {
        assert!(ColoredGraph::empty().is_connected());
        assert!(ColoredGraph::with_colors(vec![0]).is_connected());
        assert!(!ColoredGraph::with_colors(vec![0, 1]).is_connected());
        let path = ColoredGraph::from_edges(vec![0, 0, 0], &[(0, 1), (1, 2)]);
        assert!(path.is_connected());
        assert!(!path.connected_without_edge(0, 1));
        let tri = ColoredGraph::from_edges(vec![0, 0, 0], &[(0, 1), (1, 2), (0, 2)]);
        assert!(tri.connected_without_edge(0, 1));
    }

    #[test]
    fn remove_node_relabels() {
        // paw: triangle 1-2-3 with pendant 0 attached to 1
        let paw = ColoredGraph::from_edges(vec![0, 0, 0, 1], &[(0, 1), (1, 2), (1, 3), (2, 3)]);
        let tri = paw.remove_node(0);
        assert_eq!(tri.n(), 3);
        assert_eq!(tri.edge_count(), 3);
        assert_eq!(tri.colors(), &[0, 0, 1]);
    }

    #[test]
    fn permuted_preserves_structure() {
        let g = ColoredGraph::from_edges(vec![0, 1, 0], &[(0, 1)]);
        let h = g.permuted(&[2, 1, 0]);
        assert_eq!(h.colors(), &[0, 1, 0]);
        assert!(h.has_edge(1, 2));
        assert!(!h.has_edge(0, 1));
    }
}
