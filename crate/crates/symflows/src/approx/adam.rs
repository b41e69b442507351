//! Adaptive moment estimation with bias correction.

use crate::gfn::GfnError;

#[derive(Clone, Copy, Debug)]
pub struct AdamParams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamParams {
    pub fn with_lr(lr: f64) -> Self {
        AdamParams { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// First/second moment accumulators for one parameter vector.
#[derive(Clone, Debug, Default)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        AdamState { m: vec![0.0; len], v: vec![0.0; len], t: 0 }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One bias-corrected update, in place. Rejects non-finite gradients.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], cfg: &AdamParams) -> Result<(), GfnError> {
        debug_assert_eq!(params.len(), self.m.len());
        debug_assert_eq!(params.len(), grads.len());
        if grads.iter().any(|g| !g.is_finite()) {
            return Err(GfnError::NonFiniteGradient);
        }
        self.t += 1;
        let bc1 = 1.0 - cfg.beta1.powi(self.t as i32);
        let bc2 = 1.0 - cfg.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * grads[i];
            self.v[i] = cfg.beta2 * self.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut st = AdamState::new(3);
        let mut p = vec![0.5, -1.0, 2.0];
        let before = p.clone();
        st.step(&mut p, &[0.0, 0.0, 0.0], &AdamParams::with_lr(0.1)).unwrap();
        for (a, b) in p.iter().zip(&before) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut st = AdamState::new(1);
        let mut p = vec![0.0];
        st.step(&mut p, &[3.0], &AdamParams::with_lr(0.01)).unwrap();
        // bias-corrected first step is -lr·g/(|g| + eps') ≈ -lr·sign(g)
        assert!((p[0] + 0.01).abs() < 1e-6);
    }

    #[test]
    fn quadratic_bowl_converges() {
        let mut st = AdamState::new(1);
        let mut w = vec![1.0];
        let cfg = AdamParams::with_lr(0.1);
        for _ in 0..500 {
            let g = 2.0 * w[0];
            st.step(&mut w, &[g], &cfg).unwrap();
        }
        assert!(w[0].abs() < 1e-3, "w = {}", w[0]);
        assert_eq!(st.step_count(), 500);
    }

    #[test]
    fn non_finite_gradient_rejected() {
        let mut st = AdamState::new(1);
        let mut p = vec![0.0];
        assert!(st.step(&mut p, &[f64::NAN], &AdamParams::with_lr(0.1)).is_err());
    }
}
