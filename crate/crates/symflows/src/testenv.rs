//! Tiny environments and model stubs shared by unit tests.

use crate::gfn::{BackwardClass, ClassDesc, ClassEnv, FlowModel, GfnError, StepOutcome};

/// A linear chain `0 → 1 → … → L-1`; stop is legal everywhere, with a
/// per-position reward.
pub struct ChainEnv {
    pub rewards: Vec<f64>,
}

impl ClassEnv for ChainEnv {
    type State = usize;

    fn initial_state(&self) -> usize {
        0
    }

    fn classes(&self, s: &usize) -> Vec<ClassDesc> {
        let mut out = Vec::new();
        if s + 1 < self.rewards.len() {
            out.push(ClassDesc { multiplicity: 1, is_stop: false });
        }
        out.push(ClassDesc { multiplicity: 1, is_stop: true });
        out
    }

    fn step(&self, s: &usize, _class: usize, _member: u32) -> StepOutcome<usize> {
        StepOutcome { state: s + 1, backward_class: 0 }
    }

    fn backward(&self, s: &usize) -> Vec<BackwardClass<usize>> {
        if *s == 0 {
            Vec::new()
        } else {
            vec![BackwardClass { links: vec![(s - 1, 0, 1)] }]
        }
    }

    fn reward(&self, s: &usize) -> f64 {
        self.rewards[*s]
    }

    fn key(&self, s: &usize) -> Vec<u8> {
        vec![*s as u8]
    }

    fn grade(&self, s: &usize) -> u64 {
        *s as u64
    }

    fn max_len(&self) -> usize {
        self.rewards.len()
    }

    fn input_len(&self) -> usize {
        self.rewards.len()
    }

    fn encode(&self, s: &usize) -> Vec<f64> {
        let mut x = vec![0.0; self.rewards.len()];
        x[*s] = 1.0;
        x
    }

    fn fwd_slots(&self) -> usize {
        2
    }

    fn bwd_slots(&self) -> usize {
        1
    }

    fn fwd_class_slots(&self, s: &usize) -> Vec<Vec<u32>> {
        if s + 1 < self.rewards.len() {
            vec![vec![0], vec![1]]
        } else {
            vec![vec![1]]
        }
    }

    fn bwd_class_slots(&self, s: &usize) -> Vec<Vec<u32>> {
        if *s == 0 {
            Vec::new()
        } else {
            vec![vec![0]]
        }
    }
}

/// Fixed-logit model for a length-`len` chain: strongly prefers advancing
/// over stopping.
pub struct AdvanceModel {
    pub len: usize,
}

impl FlowModel<usize> for AdvanceModel {
    fn forward_logits(&mut self, s: &usize) -> Vec<f64> {
        if s + 1 < self.len {
            vec![10.0, -10.0]
        } else {
            vec![0.0]
        }
    }

    fn backward_logits(&mut self, _s: &usize) -> Vec<f64> {
        vec![0.0]
    }

    fn log_state_flow(&mut self, _s: &usize) -> f64 {
        0.0
    }

    fn log_z(&self) -> f64 {
        0.0
    }

    fn accum_forward_grad(&mut self, _s: &usize, _grad: &[f64]) {}
    fn accum_backward_grad(&mut self, _s: &usize, _grad: &[f64]) {}
    fn accum_flow_grad(&mut self, _s: &usize, _grad: f64) {}
    fn accum_log_z_grad(&mut self, _grad: f64) {}

    fn opt_step(&mut self) -> Result<(), GfnError> {
        Ok(())
    }
}
