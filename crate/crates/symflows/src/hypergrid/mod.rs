//! The D-dimensional hypergrid environment: start at the origin, move up
//! one coordinate per step or stop anywhere. The reward landscape has a
//! low plateau, a corner ring, and four (at D = 2) sharp modes; it is
//! invariant to coordinate permutation, which the model wrappers in
//! [`sym`] exploit.

pub mod sym;

use crate::gfn::{BackwardClass, ClassDesc, ClassEnv, StepOutcome};

pub use sym::{GridSymmetry, SymmetrizedGrid};

/// Position in the grid: `coords[d] ∈ [0, horizon-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridState {
    pub coords: Vec<u16>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridAction {
    Inc(usize),
    Stop,
}

/// `R(x) = r0 + 0.5·Π I[0.25 < |x_d - 0.5|] + 2·Π I[0.3 < |x_d - 0.5| < 0.4]`
/// with coordinates normalized onto `[0, 1]` by `x_d = coords[d]/(H-1)`.
/// Indicator boundaries are strict.
pub fn grid_reward(s: &GridState, horizon: usize, r0: f64) -> f64 {
    let mut ring = 1.0;
    let mut modes = 1.0;
    for &c in &s.coords {
        let x = f64::from(c) / (horizon as f64 - 1.0);
        let a = (x - 0.5).abs();
        if a <= 0.25 {
            ring = 0.0;
        }
        if !(a > 0.3 && a < 0.4) {
            modes = 0.0;
        }
    }
    r0 + 0.5 * ring + 2.0 * modes
}

/// One increment action per non-maxed dimension plus stop (always legal).
pub fn grid_actions(s: &GridState, horizon: usize) -> Vec<GridAction> {
    let mut acts: Vec<GridAction> = (0..s.coords.len())
        .filter(|&d| (s.coords[d] as usize) < horizon - 1)
        .map(GridAction::Inc)
        .collect();
    acts.push(GridAction::Stop);
    acts
}

/// Coordinates sorted non-decreasingly: the canonical representative of
/// the state's permutation orbit.
pub fn canonical_coords(s: &GridState) -> GridState {
    let mut coords = s.coords.clone();
    coords.sort_unstable();
    GridState { coords }
}

#[derive(Clone, Debug)]
pub struct HypergridEnv {
    pub horizon: usize,
    pub dim: usize,
    pub r0: f64,
}

impl HypergridEnv {
    pub fn new(horizon: usize, dim: usize, r0: f64) -> Self {
        assert!(horizon >= 2 && dim >= 1 && r0 > 0.0);
        HypergridEnv { horizon, dim, r0 }
    }

    fn inc_dims(&self, s: &GridState) -> Vec<usize> {
        (0..self.dim).filter(|&d| (s.coords[d] as usize) < self.horizon - 1).collect()
    }

    fn dec_dims(&self, s: &GridState) -> Vec<usize> {
        (0..self.dim).filter(|&d| s.coords[d] > 0).collect()
    }
}

impl ClassEnv for HypergridEnv {
    type State = GridState;

    fn initial_state(&self) -> GridState {
        GridState { coords: vec![0; self.dim] }
    }

    fn classes(&self, s: &GridState) -> Vec<ClassDesc> {
        let mut out: Vec<ClassDesc> = self
            .inc_dims(s)
            .iter()
            .map(|_| ClassDesc { multiplicity: 1, is_stop: false })
            .collect();
        out.push(ClassDesc { multiplicity: 1, is_stop: true });
        out
    }

    fn step(&self, s: &GridState, class: usize, _member: u32) -> StepOutcome<GridState> {
        let d = self.inc_dims(s)[class];
        let mut coords = s.coords.clone();
        coords[d] += 1;
        let next = GridState { coords };
        let backward_class = self
            .dec_dims(&next)
            .iter()
            .position(|&b| b == d)
            .expect("incremented dim is decrementable");
        StepOutcome { state: next, backward_class }
    }

    fn backward(&self, s: &GridState) -> Vec<BackwardClass<GridState>> {
        self.dec_dims(s)
            .iter()
            .map(|&d| {
                let mut coords = s.coords.clone();
                coords[d] -= 1;
                let parent = GridState { coords };
                let parent_class = self
                    .inc_dims(&parent)
                    .iter()
                    .position(|&p| p == d)
                    .expect("decremented dim is incrementable in parent");
                BackwardClass { links: vec![(parent, parent_class, 1)] }
            })
            .collect()
    }

    fn reward(&self, s: &GridState) -> f64 {
        grid_reward(s, self.horizon, self.r0)
    }

    fn stop_legal(&self, _s: &GridState) -> bool {
        true
    }

    fn key(&self, s: &GridState) -> Vec<u8> {
        s.coords.iter().flat_map(|c| c.to_le_bytes()).collect()
    }

    fn grade(&self, s: &GridState) -> u64 {
        s.coords.iter().map(|&c| u64::from(c)).sum()
    }

    fn max_len(&self) -> usize {
        self.dim * (self.horizon - 1) + 1
    }

    fn input_len(&self) -> usize {
        self.dim * self.horizon
    }

    fn encode(&self, s: &GridState) -> Vec<f64> {
        let mut x = vec![0.0; self.input_len()];
        for (d, &c) in s.coords.iter().enumerate() {
            x[d * self.horizon + c as usize] = 1.0;
        }
        x
    }

    fn fwd_slots(&self) -> usize {
        self.dim + 1
    }

    fn bwd_slots(&self) -> usize {
        self.dim
    }

    fn fwd_class_slots(&self, s: &GridState) -> Vec<Vec<u32>> {
        let mut slots: Vec<Vec<u32>> = self.inc_dims(s).iter().map(|&d| vec![d as u32]).collect();
        slots.push(vec![self.dim as u32]);
        slots
    }

    fn bwd_class_slots(&self, s: &GridState) -> Vec<Vec<u32>> {
        self.dec_dims(s).iter().map(|&d| vec![d as u32]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(coords: &[u16]) -> GridState {
        GridState { coords: coords.to_vec() }
    }

    #[test]
    fn reward_examples_h16() {
        let r0 = 0.1;
        assert!((grid_reward(&st(&[8, 8]), 16, r0) - r0).abs() < 1e-12);
        assert!((grid_reward(&st(&[13, 13]), 16, r0) - (r0 + 2.5)).abs() < 1e-12);
        assert!((grid_reward(&st(&[15, 15]), 16, r0) - (r0 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn reward_permutation_invariant_exhaustive() {
        // D=3, H=8: check all states against all 6 permutations
        let perms: [[usize; 3]; 6] =
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for a in 0..8u16 {
            for b in 0..8u16 {
                for c in 0..8u16 {
                    let s = st(&[a, b, c]);
                    let r = grid_reward(&s, 8, 0.001);
                    for p in &perms {
                        let q = st(&[s.coords[p[0]], s.coords[p[1]], s.coords[p[2]]]);
                        assert_eq!(r, grid_reward(&q, 8, 0.001));
                    }
                }
            }
        }
    }

    #[test]
    fn action_examples() {
        assert_eq!(grid_actions(&st(&[0, 0]), 16).len(), 3);
        assert_eq!(grid_actions(&st(&[15, 15]), 16), vec![GridAction::Stop]);
        assert_eq!(
            grid_actions(&st(&[15, 3, 15]), 16),
            vec![GridAction::Inc(1), GridAction::Stop]
        );
    }

    #[test]
    fn canonical_coords_examples() {
        assert_eq!(canonical_coords(&st(&[3, 1, 2])).coords, vec![1, 2, 3]);
        assert_eq!(canonical_coords(&st(&[5, 5, 5])).coords, vec![5, 5, 5]);
        let target = vec![0, 2, 7];
        for p in [[0usize, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let raw = [0u16, 7, 2];
            let s = st(&[raw[p[0]], raw[p[1]], raw[p[2]]]);
            assert_eq!(canonical_coords(&s).coords, target);
        }
    }

    #[test]
    fn dag_strictly_graded() {
        let env = HypergridEnv::new(4, 2, 0.1);
        let s = st(&[1, 2]);
        for (c, class) in env.classes(&s).iter().enumerate() {
            if !class.is_stop {
                let out = env.step(&s, c, 0);
                assert!(env.grade(&out.state) == env.grade(&s) + 1);
            }
        }
    }

    #[test]
    fn backward_round_trip() {
        let env = HypergridEnv::new(5, 3, 0.1);
        let s = st(&[2, 0, 4]);
        for (c, class) in env.classes(&s).iter().enumerate() {
            if class.is_stop {
                continue;
            }
            let out = env.step(&s, c, 0);
            let back = env.backward(&out.state);
            let (parent, pclass, _) = &back[out.backward_class].links[0];
            assert_eq!(parent, &s);
            let replay = env.step(parent, *pclass, 0);
            assert_eq!(replay.state, out.state);
        }
    }
}
