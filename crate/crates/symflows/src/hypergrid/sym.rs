//! State-symmetrization wrappers for hypergrid models. The reward is
//! invariant to coordinate permutation, so the flow model should be too;
//! these wrappers impose that on an arbitrary base model either exactly
//! (group averaging over all D! permutations, D! forward passes) or
//! cheaply (evaluate at the sorted canonical representative, one pass).

use crate::gfn::{FlowModel, GfnError};

use super::GridState;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridSymmetry {
    Baseline,
    GroupAverage,
    Canonical,
}

impl GridSymmetry {
    pub fn parse(s: &str) -> Option<GridSymmetry> {
        match s {
            "baseline" => Some(GridSymmetry::Baseline),
            "group_average" => Some(GridSymmetry::GroupAverage),
            "canonical" => Some(GridSymmetry::Canonical),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GridSymmetry::Baseline => "baseline",
            GridSymmetry::GroupAverage => "group_average",
            GridSymmetry::Canonical => "canonical",
        }
    }
}

/// Practical cap on group averaging: |G| = D! forward passes per call.
pub const GROUP_AVERAGE_MAX_DIM: usize = 6;

pub struct SymmetrizedGrid<M> {
    base: M,
    mode: GridSymmetry,
    horizon: usize,
    /// All permutations of the dimensions, lexicographic; `[identity]` for
    /// the baseline and canonical modes.
    perms: Vec<Vec<usize>>,
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for p in &out {
            for v in 0..d {
                if !p.contains(&v) {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
        }
        out = next;
    }
    out
}

impl<M: FlowModel<GridState>> SymmetrizedGrid<M> {
    pub fn new(base: M, mode: GridSymmetry, dim: usize, horizon: usize) -> Self {
        if mode == GridSymmetry::GroupAverage {
            assert!(dim <= GROUP_AVERAGE_MAX_DIM, "group averaging enumerates D! permutations");
        }
        let perms = match mode {
            GridSymmetry::GroupAverage => permutations(dim),
            _ => vec![(0..dim).collect()],
        };
        SymmetrizedGrid { base, mode, horizon, perms }
    }

    pub fn into_base(self) -> M {
        self.base
    }

    pub fn base(&self) -> &M {
        &self.base
    }

    pub fn base_mut(&mut self) -> &mut M {
        &mut self.base
    }

    /// `(g·s)[i] = s[g[i]]`.
    fn apply(perm: &[usize], s: &GridState) -> GridState {
        GridState { coords: perm.iter().map(|&i| s.coords[i]).collect() }
    }

    /// Stable argsort of the coordinates: position i of the canonical state
    /// holds original dimension `order[i]`. Ties keep original index order.
    fn sort_order(s: &GridState) -> Vec<usize> {
        let mut order: Vec<usize> = (0..s.coords.len()).collect();
        order.sort_by_key(|&d| (s.coords[d], d));
        order
    }

    /// Maps class indices of `s` (over dims where `legal` holds, plus an
    /// optional trailing stop) onto class indices of `g·s`.
    fn class_map(&self, s: &GridState, perm: &[usize], forward: bool) -> Vec<usize> {
        let legal = |c: u16| {
            if forward {
                (c as usize) < self.horizon - 1
            } else {
                c > 0
            }
        };
        let dims: Vec<usize> = (0..s.coords.len()).filter(|&d| legal(s.coords[d])).collect();
        // position of original dim d inside g·s
        let pos_of = |d: usize| perm.iter().position(|&p| p == d).expect("dim in perm");
        let gs = Self::apply(perm, s);
        let gdims: Vec<usize> = (0..gs.coords.len()).filter(|&i| legal(gs.coords[i])).collect();
        dims.iter()
            .map(|&d| {
                let pos = pos_of(d);
                gdims.iter().position(|&i| i == pos).expect("legality is permutation-invariant")
            })
            .collect()
    }

    /// Log of the flow-space average over the group, with per-permutation
    /// index mapping. `rows[g][mapped class]` are base values.
    fn average(values: &[Vec<f64>]) -> Vec<f64> {
        let n = values[0].len();
        let k = values.len() as f64;
        (0..n)
            .map(|c| {
                let vals: Vec<f64> = values.iter().map(|row| row[c]).collect();
                crate::gfn::logsumexp(&vals) - k.ln()
            })
            .collect()
    }

    fn head_logits(&mut self, s: &GridState, forward: bool) -> Vec<f64> {
        match self.mode {
            GridSymmetry::Baseline => {
                if forward {
                    self.base.forward_logits(s)
                } else {
                    self.base.backward_logits(s)
                }
            }
            GridSymmetry::Canonical => {
                let order = Self::sort_order(s);
                let canon = Self::apply(&order, s);
                let map = self.class_map(s, &order, forward);
                let base = if forward {
                    self.base.forward_logits(&canon)
                } else {
                    self.base.backward_logits(&canon)
                };
                let mut out: Vec<f64> = map.iter().map(|&m| base[m]).collect();
                if forward {
                    out.push(*base.last().expect("stop logit"));
                }
                out
            }
            GridSymmetry::GroupAverage => {
                let perms = self.perms.clone();
                let mut rows = Vec::with_capacity(perms.len());
                for perm in &perms {
                    let gs = Self::apply(perm, s);
                    let map = self.class_map(s, perm, forward);
                    let base = if forward {
                        self.base.forward_logits(&gs)
                    } else {
                        self.base.backward_logits(&gs)
                    };
                    let mut row: Vec<f64> = map.iter().map(|&m| base[m]).collect();
                    if forward {
                        row.push(*base.last().expect("stop logit"));
                    }
                    rows.push(row);
                }
                Self::average(&rows)
            }
        }
    }

    fn head_grads(&mut self, s: &GridState, grad: &[f64], forward: bool) {
        match self.mode {
            GridSymmetry::Baseline => {
                if forward {
                    self.base.accum_forward_grad(s, grad);
                } else {
                    self.base.accum_backward_grad(s, grad);
                }
            }
            GridSymmetry::Canonical => {
                let order = Self::sort_order(s);
                let canon = Self::apply(&order, s);
                let map = self.class_map(s, &order, forward);
                let n = if forward { map.len() + 1 } else { map.len() };
                let mut g = vec![0.0; n];
                for (i, &m) in map.iter().enumerate() {
                    g[m] += grad[i];
                }
                if forward {
                    g[n - 1] += grad[map.len()];
                }
                if forward {
                    self.base.accum_forward_grad(&canon, &g);
                } else {
                    self.base.accum_backward_grad(&canon, &g);
                }
            }
            GridSymmetry::GroupAverage => {
                // d log-mean-exp: softmax weights across the group per class
                let perms = self.perms.clone();
                let mut rows = Vec::with_capacity(perms.len());
                let mut maps = Vec::with_capacity(perms.len());
                for perm in &perms {
                    let gs = Self::apply(perm, s);
                    let map = self.class_map(s, perm, forward);
                    let base = if forward {
                        self.base.forward_logits(&gs)
                    } else {
                        self.base.backward_logits(&gs)
                    };
                    let mut row: Vec<f64> = map.iter().map(|&m| base[m]).collect();
                    if forward {
                        row.push(*base.last().expect("stop logit"));
                    }
                    rows.push(row);
                    maps.push(map);
                }
                let n = rows[0].len();
                for (gi, perm) in perms.iter().enumerate() {
                    let gs = Self::apply(perm, s);
                    let base_len = if forward { maps[gi].len() + 1 } else { maps[gi].len() };
                    let mut g = vec![0.0; base_len];
                    for c in 0..n {
                        let vals: Vec<f64> = rows.iter().map(|r| r[c]).collect();
                        let lse = crate::gfn::logsumexp(&vals);
                        let w = (rows[gi][c] - lse).exp();
                        let target = if forward && c == maps[gi].len() {
                            base_len - 1
                        } else {
                            maps[gi][c]
                        };
                        g[target] += grad[c] * w;
                    }
                    if forward {
                        self.base.accum_forward_grad(&gs, &g);
                    } else {
                        self.base.accum_backward_grad(&gs, &g);
                    }
                }
            }
        }
    }
}

impl<M: FlowModel<GridState>> FlowModel<GridState> for SymmetrizedGrid<M> {
    fn forward_logits(&mut self, s: &GridState) -> Vec<f64> {
        self.head_logits(s, true)
    }

    fn backward_logits(&mut self, s: &GridState) -> Vec<f64> {
        self.head_logits(s, false)
    }

    fn log_state_flow(&mut self, s: &GridState) -> f64 {
        match self.mode {
            GridSymmetry::Baseline => self.base.log_state_flow(s),
            GridSymmetry::Canonical => {
                let canon = Self::apply(&Self::sort_order(s), s);
                self.base.log_state_flow(&canon)
            }
            GridSymmetry::GroupAverage => {
                let perms = self.perms.clone();
                let vals: Vec<f64> = perms
                    .iter()
                    .map(|perm| self.base.log_state_flow(&Self::apply(perm, s)))
                    .collect();
                crate::gfn::logsumexp(&vals) - (perms.len() as f64).ln()
            }
        }
    }

    fn log_z(&self) -> f64 {
        self.base.log_z()
    }

    fn accum_forward_grad(&mut self, s: &GridState, grad: &[f64]) {
        self.head_grads(s, grad, true);
    }

    fn accum_backward_grad(&mut self, s: &GridState, grad: &[f64]) {
        self.head_grads(s, grad, false);
    }

    fn accum_flow_grad(&mut self, s: &GridState, grad: f64) {
        match self.mode {
            GridSymmetry::Baseline => self.base.accum_flow_grad(s, grad),
            GridSymmetry::Canonical => {
                let canon = Self::apply(&Self::sort_order(s), s);
                self.base.accum_flow_grad(&canon, grad);
            }
            GridSymmetry::GroupAverage => {
                let perms = self.perms.clone();
                let vals: Vec<f64> = perms
                    .iter()
                    .map(|perm| self.base.log_state_flow(&Self::apply(perm, s)))
                    .collect();
                let lse = crate::gfn::logsumexp(&vals);
                for (perm, v) in perms.iter().zip(&vals) {
                    let gs = Self::apply(perm, s);
                    self.base.accum_flow_grad(&gs, grad * (v - lse).exp());
                }
            }
        }
    }

    fn accum_log_z_grad(&mut self, grad: f64) {
        self.base.accum_log_z_grad(grad);
    }

    fn opt_step(&mut self) -> Result<(), GfnError> {
        self.base.opt_step()
    }
}
