//! Color-weighted random-walk positional encodings.
//!
//! `M = AD⁻¹` is the column-stochastic walk matrix (column `j` of `A`
//! scaled by `1/deg(j)`, with degree-0 columns set to zero). The feature of
//! node `i` collects one entry per power `k = 1..K`; three readings of how
//! node colors enter are supported:
//!
//! * [`RwOrientation::ColorDiag`] — `x_k[i] = c_i·(Mᵏ)_{ii}`: the classic
//!   return-probability RWPE weighted by the node's color value.
//! * [`RwOrientation::ColorMass`] — `x_k = Mᵏ c`: the color mass a node
//!   receives after `k` walk steps. The graph-level sum telescopes to the
//!   constant `Σc`.
//! * [`RwOrientation::WalkExpectation`] — `xᵀ_k = cᵀMᵏ`: the expected color
//!   after a `k`-step walk started at the node. Constant on monochromatic
//!   graphs.
//!
//! Every sum is accumulated in value-sorted order so that features are
//! bit-identical across node relabelings; without this, quantized keys can
//! split an isomorphism class on rounding boundaries.

use super::graph::ColoredGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RwOrientation {
    ColorDiag,
    ColorMass,
    WalkExpectation,
}

impl RwOrientation {
    pub fn parse(s: &str) -> Option<RwOrientation> {
        match s {
            "diag" => Some(RwOrientation::ColorDiag),
            "mass" => Some(RwOrientation::ColorMass),
            "walk" => Some(RwOrientation::WalkExpectation),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RwOrientation::ColorDiag => "diag",
            RwOrientation::ColorMass => "mass",
            RwOrientation::WalkExpectation => "walk",
        }
    }
}

const PRIMES: [f64; 16] = [
    2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0, 23.0, 29.0, 31.0, 37.0, 41.0, 43.0, 47.0, 53.0,
];

/// Color id `k` maps to the `(k+1)`-th prime so distinct colors contribute
/// distinct non-zero mass and accidental sum coincidences stay rare.
pub fn color_values(colors: &[u8]) -> Vec<f64> {
    colors.iter().map(|&c| PRIMES[c as usize % PRIMES.len()]).collect()
}

/// Order-independent float sum: identical results for any permutation of
/// the addends.
pub fn stable_sum(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    values.iter().sum()
}

/// Per-node K-vectors from an explicit node-value vector.
pub fn rwpe_with_values(
    g: &ColoredGraph,
    values: &[f64],
    k: usize,
    orientation: RwOrientation,
) -> Vec<Vec<f64>> {
    let n = g.n();
    assert_eq!(values.len(), n);
    match orientation {
        RwOrientation::ColorDiag => diag_features(g, values, k),
        RwOrientation::ColorMass | RwOrientation::WalkExpectation => {
            let mut out = vec![Vec::with_capacity(k); n];
            let mut cur = values.to_vec();
            let mut next = vec![0.0; n];
            let mut buf: Vec<f64> = Vec::with_capacity(n);
            for _ in 0..k {
                for i in 0..n {
                    buf.clear();
                    match orientation {
                        RwOrientation::ColorMass => {
                            buf.extend(g.neighbors(i).map(|j| cur[j] / g.degree(j) as f64));
                            next[i] = stable_sum(&mut buf);
                        }
                        RwOrientation::WalkExpectation => {
                            let d = g.degree(i);
                            if d == 0 {
                                next[i] = 0.0;
                            } else {
                                buf.extend(g.neighbors(i).map(|j| cur[j]));
                                next[i] = stable_sum(&mut buf) / d as f64;
                            }
                        }
                        RwOrientation::ColorDiag => unreachable!(),
                    }
                }
                std::mem::swap(&mut cur, &mut next);
                for (i, x) in cur.iter().enumerate() {
                    out[i].push(*x);
                }
            }
            out
        }
    }
}

/// Diagonal reading: full powers of the walk matrix, diagonal entries
/// weighted by the node value.
fn diag_features(g: &ColoredGraph, values: &[f64], k: usize) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in g.neighbors(i) {
            m[i][j] = 1.0 / g.degree(j) as f64;
        }
    }
    let mut out = vec![Vec::with_capacity(k); n];
    let mut power = m.clone();
    let mut buf: Vec<f64> = Vec::with_capacity(n);
    for step in 0..k {
        if step > 0 {
            let mut next = vec![vec![0.0; n]; n];
            for (i, row) in next.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    buf.clear();
                    buf.extend((0..n).map(|l| power[i][l] * m[l][j]));
                    *cell = stable_sum(&mut buf);
                }
            }
            power = next;
        }
        for i in 0..n {
            out[i].push(values[i] * power[i][i]);
        }
    }
    out
}

/// Per-node K-vectors with the prime color values and the diagonal reading.
pub fn rwpe_node(g: &ColoredGraph, k: usize) -> Vec<Vec<f64>> {
    rwpe_with_values(g, &color_values(g.colors()), k, RwOrientation::ColorDiag)
}

/// Edge feature of `(i, j)`: elementwise sum of squared endpoint features.
/// Squares rather than a plain sum keep distinct unordered pairs from
/// colliding while staying symmetric in `(i, j)`.
pub fn edge_feature(xi: &[f64], xj: &[f64]) -> Vec<f64> {
    xi.iter().zip(xj).map(|(a, b)| a * a + b * b).collect()
}

/// Edge features for every existing edge of `g`.
pub fn edge_pe(g: &ColoredGraph, node_features: &[Vec<f64>]) -> Vec<((usize, usize), Vec<f64>)> {
    g.edges()
        .into_iter()
        .map(|(u, v)| ((u, v), edge_feature(&node_features[u], &node_features[v])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_unit_values_fixed_point() {
        let g = ColoredGraph::from_edges(vec![0, 1], &[(0, 1)]);
        for orientation in [RwOrientation::ColorMass, RwOrientation::WalkExpectation] {
            let x = rwpe_with_values(&g, &[1.0, 1.0], 2, orientation);
            assert_eq!(x[0], vec![1.0, 1.0]);
            assert_eq!(x[1], vec![1.0, 1.0]);
        }
        // diag: return probability on an edge alternates 0, 1, 0, 1, ...
        let x = rwpe_with_values(&g, &[1.0, 1.0], 3, RwOrientation::ColorDiag);
        assert_eq!(x[0], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn isolated_node_zero() {
        let g = ColoredGraph::with_colors(vec![0]);
        let x = rwpe_node(&g, 3);
        assert_eq!(x[0], vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn mono_triangle_unit_values() {
        let g = ColoredGraph::from_edges(vec![0; 3], &[(0, 1), (1, 2), (0, 2)]);
        let x = rwpe_with_values(&g, &[1.0; 3], 3, RwOrientation::ColorMass);
        for xi in x {
            assert_eq!(xi, vec![1.0, 1.0, 1.0]);
        }
        // diag on K3: return probabilities 0, 1/2, 1/4
        let x = rwpe_with_values(&g, &[1.0; 3], 3, RwOrientation::ColorDiag);
        for xi in x {
            assert_eq!(xi, vec![0.0, 0.5, 0.25]);
        }
    }

    #[test]
    fn color_mass_sum_telescopes() {
        // graph-level sum of the color-mass reading is Σc at every power
        let g = ColoredGraph::from_edges(vec![0, 1, 0, 1], &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]);
        let vals = color_values(g.colors());
        let total: f64 = vals.iter().sum();
        let x = rwpe_with_values(&g, &vals, 4, RwOrientation::ColorMass);
        for k in 0..4 {
            let s: f64 = (0..g.n()).map(|i| x[i][k]).sum();
            assert!((s - total).abs() < 1e-12);
        }
    }

    #[test]
    fn walk_expectation_constant_on_mono() {
        let g = ColoredGraph::from_edges(vec![0; 4], &[(0, 1), (1, 2), (2, 3)]);
        let vals = color_values(g.colors());
        let x = rwpe_with_values(&g, &vals, 4, RwOrientation::WalkExpectation);
        for xi in &x {
            for v in xi {
                assert!((v - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn features_bit_identical_under_relabeling() {
        let g = ColoredGraph::from_edges(
            vec![0, 1, 0, 1, 0, 1],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4), (2, 5)],
        );
        let perm = [4, 2, 0, 5, 1, 3];
        let h = g.permuted(&perm);
        for orientation in [RwOrientation::ColorDiag, RwOrientation::ColorMass, RwOrientation::WalkExpectation] {
            let xg = rwpe_with_values(&g, &color_values(g.colors()), 8, orientation);
            let xh = rwpe_with_values(&h, &color_values(h.colors()), 8, orientation);
            for (new, &old) in perm.iter().enumerate() {
                assert_eq!(xg[old], xh[new], "{orientation:?}");
            }
        }
    }

    #[test]
    fn edge_feature_examples() {
        assert_eq!(edge_feature(&[1.0], &[1.0]), vec![2.0]);
        assert_eq!(edge_feature(&[2.0], &[3.0]), vec![13.0]);
        assert_eq!(edge_feature(&[2.0], &[3.0]), edge_feature(&[3.0], &[2.0]));
    }
}
