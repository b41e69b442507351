//! Positional-encoding keys used to approximate isomorphism tests.
//!
//! A key is a flat `Vec<u64>` so it can be hashed and compared exactly.
//! Real-valued components are rounded to 9 decimal places first: random-walk
//! entries are ratios of small integers at this scale, so the rounding
//! absorbs float noise without merging genuinely distinct values. All float
//! sums are accumulated in value-sorted order (see [`super::rwpe`]), which
//! keeps keys bit-identical across node relabelings.

use super::graph::ColoredGraph;
use super::rwpe::{color_values, rwpe_with_values, stable_sum, RwOrientation};
use super::wl::{hash_mix, hash_seq, partition_ids, wl_node_signatures};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeLevel {
    /// Group actions by the PE of each successor graph.
    Graph,
    /// Group node-adding actions by the attach node's PE and edge-adding
    /// actions by the candidate pair's edge PE, all computed on the
    /// original graph.
    NodeEdge,
}

/// How the per-node WL signatures are summarized into the graph-level key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WlSummary {
    /// Sorted multiset of (class color, class size) pairs. Refined class
    /// identities are graph-local (as in implementations that renumber WL
    /// labels per graph before comparing across graphs); only the round-0
    /// labels — the colors — carry meaning across graphs.
    IdMultiset,
    /// Hash of the sorted raw signature multiset: the full refinement
    /// outcome, far stronger across graphs.
    SigHash,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeConfig {
    pub use_wl: bool,
    pub use_rw: bool,
    pub use_edge: bool,
    /// Random-walk powers per node feature.
    pub rw_powers: usize,
    /// 1-WL rounds; `None` runs to the partition fixed point.
    pub wl_rounds: Option<usize>,
    pub wl_summary: WlSummary,
    pub orientation: RwOrientation,
    pub level: PeLevel,
}

impl Default for PeConfig {
    fn default() -> Self {
        PeConfig {
            use_wl: false,
            use_rw: true,
            use_edge: true,
            rw_powers: 8,
            wl_rounds: None,
            wl_summary: WlSummary::IdMultiset,
            orientation: RwOrientation::ColorMass,
            level: PeLevel::NodeEdge,
        }
    }
}

impl PeConfig {
    /// Parses a component list such as `"rw+edge"` or `"wl+rw+edge"`.
    pub fn from_components(spec: &str) -> Option<PeConfig> {
        let mut cfg = PeConfig { use_wl: false, use_rw: false, use_edge: false, ..PeConfig::default() };
        for part in spec.split('+') {
            match part.trim() {
                "wl" => cfg.use_wl = true,
                "rw" => cfg.use_rw = true,
                "edge" => cfg.use_edge = true,
                _ => return None,
            }
        }
        if cfg.use_wl || cfg.use_rw || cfg.use_edge {
            Some(cfg)
        } else {
            None
        }
    }

    pub fn components(&self) -> String {
        let mut parts = Vec::new();
        if self.use_wl {
            parts.push("wl");
        }
        if self.use_rw {
            parts.push("rw");
        }
        if self.use_edge {
            parts.push("edge");
        }
        parts.join("+")
    }

    /// Node features are needed whenever RW is on, and also to build edge
    /// features when `edge` is enabled without WL.
    fn needs_rw(&self) -> bool {
        self.use_rw || (self.use_edge && !self.use_wl)
    }

    fn wl_rounds_for(&self, g: &ColoredGraph) -> usize {
        self.wl_rounds.unwrap_or(g.n())
    }
}

/// Exact key wrapper; equality means "indistinguishable under this config".
pub type PeKey = Vec<u64>;

/// Per-graph features shared by the graph-level and node/edge-level keys.
pub struct PeFeatures {
    pub wl_sigs: Vec<u64>,
    /// Graph-local class ids of the signatures, ordered by ascending value.
    pub wl_ids: Vec<usize>,
    pub rw: Vec<Vec<f64>>,
}

pub fn compute_features(g: &ColoredGraph, cfg: &PeConfig) -> PeFeatures {
    let wl_sigs = if cfg.use_wl {
        wl_node_signatures(g, cfg.wl_rounds_for(g))
    } else {
        Vec::new()
    };
    let wl_ids = if cfg.use_wl { partition_ids(&wl_sigs) } else { Vec::new() };
    let rw = if cfg.needs_rw() {
        rwpe_with_values(g, &color_values(g.colors()), cfg.rw_powers, cfg.orientation)
    } else {
        Vec::new()
    };
    PeFeatures { wl_sigs, wl_ids, rw }
}

fn quantize(v: f64) -> u64 {
    ((v * 1e9).round() as i64) as u64
}

/// Graph-level PE: concatenation of the enabled components, each invariant
/// under node relabeling.
pub fn graph_pe(g: &ColoredGraph, cfg: &PeConfig) -> PeKey {
    let feats = compute_features(g, cfg);
    graph_pe_from_features(g, cfg, &feats)
}

pub fn graph_pe_from_features(g: &ColoredGraph, cfg: &PeConfig, feats: &PeFeatures) -> PeKey {
    let mut key = PeKey::new();
    if cfg.use_wl {
        key.push(1);
        match cfg.wl_summary {
            WlSummary::IdMultiset => {
                // (color, degree, size) per refined class, sorted; a
                // stabilized class is degree-uniform, so this is the class
                // profile without the graph-local refinement identities
                let n_classes = feats.wl_ids.iter().max().map_or(0, |&m| m + 1);
                let mut class_color = vec![0u64; n_classes];
                let mut class_degree = vec![u64::MAX; n_classes];
                let mut class_size = vec![0u64; n_classes];
                for v in 0..g.n() {
                    let c = feats.wl_ids[v];
                    class_color[c] = u64::from(g.color(v));
                    class_degree[c] = class_degree[c].min(g.degree(v) as u64);
                    class_size[c] += 1;
                }
                let mut pairs: Vec<u64> = (0..n_classes)
                    .map(|c| (class_color[c] << 48) | (class_degree[c] << 24) | class_size[c])
                    .collect();
                pairs.sort_unstable();
                key.extend(pairs);
            }
            WlSummary::SigHash => {
                let mut sorted = feats.wl_sigs.clone();
                sorted.sort_unstable();
                key.push(hash_seq(sorted));
            }
        }
    }
    if cfg.use_rw {
        key.push(2);
        let mut buf = Vec::with_capacity(g.n());
        for k in 0..cfg.rw_powers {
            buf.clear();
            buf.extend((0..g.n()).map(|i| feats.rw[i][k]));
            key.push(quantize(stable_sum(&mut buf)));
        }
    }
    if cfg.use_edge {
        key.push(3);
        let edges = g.edges();
        if cfg.use_wl {
            match cfg.wl_summary {
                WlSummary::IdMultiset => {
                    // small exact integers; +1 keeps class 0 visible
                    let acc: u64 = edges
                        .iter()
                        .map(|&(u, v)| {
                            let a = feats.wl_ids[u] as u64 + 1;
                            let b = feats.wl_ids[v] as u64 + 1;
                            a * a + b * b
                        })
                        .sum();
                    key.push(acc);
                }
                WlSummary::SigHash => {
                    let mut acc = 0u64;
                    for &(u, v) in &edges {
                        let a = feats.wl_sigs[u];
                        let b = feats.wl_sigs[v];
                        acc = acc
                            .wrapping_add(a.wrapping_mul(a))
                            .wrapping_add(b.wrapping_mul(b));
                    }
                    key.push(acc);
                }
            }
        }
        if cfg.needs_rw() {
            let mut buf = Vec::with_capacity(edges.len());
            for k in 0..cfg.rw_powers {
                buf.clear();
                buf.extend(edges.iter().map(|&(u, v)| {
                    let a = feats.rw[u][k];
                    let b = feats.rw[v][k];
                    a * a + b * b
                }));
                key.push(quantize(stable_sum(&mut buf)));
            }
        }
    }
    key
}

/// Node-level PE of node `v`, for grouping node-adding actions within one
/// graph.
pub fn node_key(cfg: &PeConfig, feats: &PeFeatures, v: usize) -> PeKey {
    let mut key = PeKey::new();
    if cfg.use_wl {
        key.push(feats.wl_sigs[v]);
    }
    if cfg.needs_rw() {
        key.extend(feats.rw[v].iter().map(|&x| quantize(x)));
    }
    key
}

/// Edge-level PE of the (possibly non-adjacent) pair `{u, v}`, for grouping
/// edge-adding actions. Symmetric in the pair by construction.
pub fn pair_key(cfg: &PeConfig, feats: &PeFeatures, u: usize, v: usize) -> PeKey {
    let mut key = PeKey::new();
    if cfg.use_wl {
        let a = feats.wl_sigs[u];
        let b = feats.wl_sigs[v];
        key.push(a.wrapping_mul(a).wrapping_add(b.wrapping_mul(b)));
    }
    if cfg.needs_rw() {
        key.extend(
            feats.rw[u]
                .iter()
                .zip(&feats.rw[v])
                .map(|(&a, &b)| quantize(a * a + b * b)),
        );
    }
    key
}

const KIND_SALT: u64 = 0x61c7_10e5_a11b_07d1;

/// Tags a composite key so different action kinds can never collide.
pub fn tagged(tag: u64, key: PeKey) -> PeKey {
    let mut out = Vec::with_capacity(key.len() + 1);
    out.push(hash_mix(KIND_SALT, tag));
    out.extend(key);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_cfg(level: PeLevel) -> PeConfig {
        PeConfig { use_wl: true, use_rw: true, use_edge: true, level, ..PeConfig::default() }
    }

    #[test]
    fn relabeling_invariant() {
        let g = ColoredGraph::from_edges(vec![0, 1, 0, 1, 0], &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]);
        let h = g.permuted(&[3, 0, 4, 1, 2]);
        assert_eq!(graph_pe(&g, &all_cfg(PeLevel::Graph)), graph_pe(&h, &all_cfg(PeLevel::Graph)));
    }

    #[test]
    fn empty_graph_has_canonical_key() {
        let cfg = all_cfg(PeLevel::Graph);
        assert_eq!(graph_pe(&ColoredGraph::empty(), &cfg), graph_pe(&ColoredGraph::empty(), &cfg));
    }

    #[test]
    fn wl_only_merges_c6_and_two_triangles() {
        let c6 = ColoredGraph::from_edges(
            vec![0; 6],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)],
        );
        let two_c3 = ColoredGraph::from_edges(
            vec![0; 6],
            &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)],
        );
        let cfg = PeConfig::from_components("wl").unwrap();
        assert_eq!(graph_pe(&c6, &cfg), graph_pe(&two_c3, &cfg));
        // under the mass reading both 2-regular graphs collide on every
        // component; the diagonal reading separates them because C6 has no
        // odd closed walks
        let cfg = PeConfig::from_components("wl+rw+edge").unwrap();
        assert_eq!(graph_pe(&c6, &cfg), graph_pe(&two_c3, &cfg));
        let diag = PeConfig { orientation: crate::graphsym::rwpe::RwOrientation::ColorDiag, ..cfg };
        assert_ne!(graph_pe(&c6, &diag), graph_pe(&two_c3, &diag));
    }

    #[test]
    fn degree_profile_separated_by_rw_edge() {
        let p4 = ColoredGraph::from_edges(vec![0; 4], &[(0, 1), (1, 2), (2, 3)]);
        let star = ColoredGraph::from_edges(vec![0; 4], &[(0, 1), (0, 2), (0, 3)]);
        let cfg = PeConfig::from_components("rw+edge").unwrap();
        assert_ne!(graph_pe(&p4, &cfg), graph_pe(&star, &cfg));
    }

    #[test]
    fn component_parsing_round_trips() {
        for name in ["wl", "rw", "edge", "wl+edge", "rw+edge", "wl+rw", "wl+rw+edge"] {
            assert_eq!(PeConfig::from_components(name).unwrap().components(), name);
        }
        assert!(PeConfig::from_components("foo").is_none());
        assert!(PeConfig::from_components("").is_none());
    }
}
