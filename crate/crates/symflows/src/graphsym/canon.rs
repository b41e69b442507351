//! Exact canonical labeling by brute force over node permutations.
//!
//! The canonical encoding of a graph is the lexicographically minimal byte
//! string `[0x01, n, colors[0..n], upper-triangle bits]` over all node
//! relabelings, where the adjacency bits are laid out row-major
//! ((0,1), (0,2), …, (0,n-1), (1,2), …) and packed MSB-first so that byte
//! comparison equals bit comparison.
//!
//! Because the color bytes precede the adjacency bits, a minimal encoding
//! always lists colors in non-decreasing order; the search therefore only
//! permutes nodes within color classes, which prunes the factorial blowup
//! to the product of per-class factorials.

use thiserror::Error;

use super::graph::{ColoredGraph, N_MAX};

/// Format version byte of the canonical encoding.
pub const CANON_VERSION: u8 = 0x01;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CanonError {
    #[error("graph too large for exact canonicalization ({n} > {max} nodes)")]
    TooLarge { n: usize, max: usize },
}

/// Canonical byte encoding of `g`; equal for `g` and any relabeling of `g`.
pub fn canonical_form(g: &ColoredGraph) -> Result<Vec<u8>, CanonError> {
    let (word, perm) = min_word_perm(g)?;
    Ok(encode(g, word, &perm))
}

/// Canonically relabeled copy of `g` plus the old→new node mapping that
/// produces it (`new_id[old] = mapping[old]`).
pub fn canonicalize(g: &ColoredGraph) -> Result<(ColoredGraph, Vec<usize>), CanonError> {
    let (_, perm) = min_word_perm(g)?;
    let mut old_to_new = vec![0usize; g.n()];
    for (pos, &old) in perm.iter().enumerate() {
        old_to_new[old] = pos;
    }
    Ok((g.permuted(&perm), old_to_new))
}

/// Exact color-preserving isomorphism test via canonical form equality.
pub fn is_isomorphic(a: &ColoredGraph, b: &ColoredGraph) -> Result<bool, CanonError> {
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    let mut ca: Vec<u8> = a.colors().to_vec();
    let mut cb: Vec<u8> = b.colors().to_vec();
    ca.sort_unstable();
    cb.sort_unstable();
    if ca != cb {
        return Ok(false);
    }
    // (color, degree) multisets are cheap and rule out most non-isomorphic pairs
    let mut da: Vec<(u8, usize)> = (0..a.n()).map(|v| (a.color(v), a.degree(v))).collect();
    let mut db: Vec<(u8, usize)> = (0..b.n()).map(|v| (b.color(v), b.degree(v))).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

/// Rebuilds a graph from its canonical encoding (used for index files).
pub fn decode_canonical(bytes: &[u8]) -> Option<ColoredGraph> {
    if bytes.len() < 2 || bytes[0] != CANON_VERSION {
        return None;
    }
    let n = bytes[1] as usize;
    let nbits = n * n.saturating_sub(1) / 2;
    if bytes.len() != 2 + n + nbits.div_ceil(8) {
        return None;
    }
    let colors = bytes[2..2 + n].to_vec();
    let mut g = ColoredGraph::with_colors(colors);
    let adj = &bytes[2 + n..];
    let mut idx = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if adj[idx / 8] & (0x80 >> (idx % 8)) != 0 {
                g.add_edge(i, j);
            }
            idx += 1;
        }
    }
    Some(g)
}

fn encode(g: &ColoredGraph, word: u64, perm: &[usize]) -> Vec<u8> {
    let n = g.n();
    let nbits = n * n.saturating_sub(1) / 2;
    let mut out = Vec::with_capacity(2 + n + nbits.div_ceil(8));
    out.push(CANON_VERSION);
    out.push(n as u8);
    for &p in perm {
        out.push(g.color(p));
    }
    // word holds the row-major bits with bit index 0 at position nbits-1
    out.extend((0..nbits.div_ceil(8)).map(|byte| {
        let mut b = 0u8;
        for bit in 0..8 {
            let idx = byte * 8 + bit;
            if idx < nbits && word & (1u64 << (nbits - 1 - idx)) != 0 {
                b |= 0x80 >> bit;
            }
        }
        b
    }));
    out
}

/// Minimal row-major adjacency word over all color-sorted relabelings,
/// together with the position→old-node permutation achieving it.
fn min_word_perm(g: &ColoredGraph) -> Result<(u64, Vec<usize>), CanonError> {
    let n = g.n();
    if n > N_MAX {
        return Err(CanonError::TooLarge { n, max: N_MAX });
    }
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    // target color of each position: sorted ascending
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by_key(|&v| (g.color(v), v));
    let want: Vec<u8> = sorted.iter().map(|&v| g.color(v)).collect();

    let mut search = Search {
        g,
        want: &want,
        perm: vec![0usize; n],
        used: 0u16,
        best_word: u64::MAX,
        best_perm: sorted.clone(),
    };
    search.go(0);
    Ok((search.best_word, search.best_perm))
}

struct Search<'a> {
    g: &'a ColoredGraph,
    want: &'a [u8],
    perm: Vec<usize>,
    used: u16,
    best_word: u64,
    best_perm: Vec<usize>,
}

impl Search<'_> {
    fn go(&mut self, pos: usize) {
        let n = self.g.n();
        if pos == n {
            let word = self.word();
            if word < self.best_word {
                self.best_word = word;
                self.best_perm.copy_from_slice(&self.perm);
            }
            return;
        }
        for v in 0..n {
            if self.used & (1 << v) == 0 && self.g.color(v) == self.want[pos] {
                self.perm[pos] = v;
                self.used |= 1 << v;
                self.go(pos + 1);
                self.used &= !(1 << v);
            }
        }
    }

    fn word(&self) -> u64 {
        let n = self.g.n();
        let mut w = 0u64;
        for i in 0..n {
            for j in (i + 1)..n {
                w = (w << 1) | u64::from(self.g.has_edge(self.perm[i], self.perm[j]));
            }
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn single_node() {
        let g = ColoredGraph::with_colors(vec![0]);
        assert_eq!(canonical_form(&g).unwrap(), vec![CANON_VERSION, 1, 0]);
    }

    #[test]
    fn triangle_relabelings_agree() {
        let tri = ColoredGraph::from_edges(vec![0, 0, 0], &[(0, 1), (1, 2), (0, 2)]);
        let forms: Vec<_> = perms(3)
            .iter()
            .map(|p| canonical_form(&tri.permuted(p)).unwrap())
            .collect();
        assert!(forms.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn path_vs_star_differ() {
        // independent check: no relabeling of P4 matches K_{1,3}
        let p4 = ColoredGraph::from_edges(vec![0; 4], &[(0, 1), (1, 2), (2, 3)]);
        let star = ColoredGraph::from_edges(vec![0; 4], &[(0, 1), (0, 2), (0, 3)]);
        for p in perms(4) {
            let relabeled = p4.permuted(&p);
            let equal = (0..4).all(|u| (0..4).all(|v| relabeled.has_edge(u, v) == star.has_edge(u, v)));
            assert!(!equal);
        }
        assert_ne!(canonical_form(&p4).unwrap(), canonical_form(&star).unwrap());
        assert!(!is_isomorphic(&p4, &star).unwrap());
    }

    #[test]
    fn colored_triangle_relabeling_isomorphic() {
        let a = ColoredGraph::from_edges(vec![0, 0, 1], &[(0, 1), (1, 2), (0, 2)]);
        let b = ColoredGraph::from_edges(vec![0, 1, 0], &[(0, 1), (1, 2), (0, 2)]);
        assert!(is_isomorphic(&a, &b).unwrap());
        let c = ColoredGraph::from_edges(vec![1, 1, 0], &[(0, 1), (1, 2), (0, 2)]);
        assert!(!is_isomorphic(&a, &c).unwrap());
    }

    #[test]
    fn decode_round_trips() {
        let g = ColoredGraph::from_edges(vec![1, 0, 0, 1], &[(0, 1), (1, 2), (1, 3), (2, 3)]);
        let bytes = canonical_form(&g).unwrap();
        let back = decode_canonical(&bytes).unwrap();
        assert_eq!(canonical_form(&back).unwrap(), bytes);
        assert!(is_isomorphic(&g, &back).unwrap());
    }

    #[test]
    fn too_large_rejected() {
        let g = ColoredGraph::with_colors(vec![0; N_MAX + 1]);
        assert_eq!(
            canonical_form(&g).unwrap_err(),
            CanonError::TooLarge { n: N_MAX + 1, max: N_MAX }
        );
    }
}
