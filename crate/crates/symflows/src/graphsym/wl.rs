//! 1-WL (color refinement) node signatures with a fixed, published hash seed
//! so signatures are identical across runs and platforms.

use super::graph::ColoredGraph;

/// Seed of the signature hash chain. Changing it changes every signature.
pub const WL_HASH_SEED: u64 = 0x53_59_4d_46_4c_4f_57_53; // "SYMFLOWS"

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Absorbs one value into a running hash.
pub fn hash_mix(h: u64, v: u64) -> u64 {
    splitmix64(h ^ splitmix64(v))
}

/// Hash of a value sequence, order-sensitive.
pub fn hash_seq(vals: impl IntoIterator<Item = u64>) -> u64 {
    vals.into_iter().fold(WL_HASH_SEED, hash_mix)
}

/// Per-node 1-WL signatures. Starts from node colors and rehashes
/// (own signature, sorted multiset of neighbor signatures) each round;
/// stops at the partition fixed point or after `rounds`, whichever is first.
///
/// Nodes related by an automorphism always share a signature. The converse
/// fails on regular structures (see the C6 / 2C3 test below).
pub fn wl_node_signatures(g: &ColoredGraph, rounds: usize) -> Vec<u64> {
    let n = g.n();
    let mut sigs: Vec<u64> = (0..n).map(|v| hash_mix(WL_HASH_SEED, u64::from(g.color(v)))).collect();
    let mut nbr = Vec::with_capacity(n);
    for _ in 0..rounds {
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            nbr.clear();
            nbr.extend(g.neighbors(v).map(|u| sigs[u]));
            nbr.sort_unstable();
            let mut h = hash_mix(WL_HASH_SEED, sigs[v]);
            h = hash_mix(h, nbr.len() as u64);
            for &s in &nbr {
                h = hash_mix(h, s);
            }
            next.push(h);
        }
        if partition_ids(&next) == partition_ids(&sigs) {
            return sigs;
        }
        sigs = next;
    }
    sigs
}

/// Signatures run to the partition fixed point (at most `n` rounds needed).
pub fn wl_stable_signatures(g: &ColoredGraph) -> Vec<u64> {
    wl_node_signatures(g, g.n())
}

/// Dense class ids (0-based) ordered by ascending signature value.
pub fn partition_ids(sigs: &[u64]) -> Vec<usize> {
    let mut uniq: Vec<u64> = sigs.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    sigs.iter().map(|s| uniq.binary_search(s).unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolated_same_color_nodes_share() {
        let g = ColoredGraph::with_colors(vec![1, 1]);
        let s = wl_stable_signatures(&g);
        assert_eq!(s[0], s[1]);
    }

    #[test]
    fn path_center_separates() {
        let p3 = ColoredGraph::from_edges(vec![0, 0, 0], &[(0, 1), (1, 2)]);
        let s = wl_stable_signatures(&p3);
        assert_eq!(s[0], s[2]);
        assert_ne!(s[0], s[1]);
    }

    #[test]
    fn c6_vs_two_triangles_not_separated() {
        // classic 1-WL failure: every node is degree 2 with degree-2 neighbors
        let c6 = ColoredGraph::from_edges(
            vec![0; 6],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)],
        );
        let two_c3 = ColoredGraph::from_edges(
            vec![0; 6],
            &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)],
        );
        let a = wl_stable_signatures(&c6);
        let b = wl_stable_signatures(&two_c3);
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert!(b.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(a[0], b[0]);
    }

    #[test]
    fn zero_rounds_is_color_partition() {
        let g = ColoredGraph::from_edges(vec![0, 1, 0], &[(0, 1), (1, 2)]);
        let s = wl_node_signatures(&g, 0);
        assert_eq!(s[0], s[2]);
        assert_ne!(s[0], s[1]);
    }
}
