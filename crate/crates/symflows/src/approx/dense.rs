//! A small dense network with tanh hidden layers, a linear output layer,
//! and hand-written reverse-mode gradients. Double precision throughout so
//! finite-difference checks have headroom.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetError {
    #[error("input length {got} does not match configured size {want}")]
    InputSize { got: usize, want: usize },
    #[error("gradient length {got} does not match output size {want}")]
    GradSize { got: usize, want: usize },
}

/// Weight matrices are row-major `[out × in]`.
#[derive(Clone, Debug)]
pub struct DenseNet {
    sizes: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

/// Parameter gradients with the same shapes as the net.
#[derive(Clone, Debug)]
pub struct DenseGrads {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl DenseGrads {
    pub fn zeros_like(net: &DenseNet) -> Self {
        DenseGrads {
            weights: net.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: net.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn clear(&mut self) {
        for w in &mut self.weights {
            w.fill(0.0);
        }
        for b in &mut self.biases {
            b.fill(0.0);
        }
    }
}

impl DenseNet {
    /// Weights drawn uniformly from `[-1/√fan_in, +1/√fan_in]`, biases zero.
    pub fn new(sizes: &[usize], rng: &mut impl Rng) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output sizes");
        let mut weights = Vec::with_capacity(sizes.len() - 1);
        let mut biases = Vec::with_capacity(sizes.len() - 1);
        for l in 0..sizes.len() - 1 {
            let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            weights.push((0..fan_in * fan_out).map(|_| rng.gen_range(-bound..bound)).collect());
            biases.push(vec![0.0; fan_out]);
        }
        DenseNet { sizes: sizes.to_vec(), weights, biases }
    }

    pub fn zeros(sizes: &[usize]) -> Self {
        let mut net = DenseNet {
            sizes: sizes.to_vec(),
            weights: Vec::new(),
            biases: Vec::new(),
        };
        for l in 0..sizes.len() - 1 {
            net.weights.push(vec![0.0; sizes[l] * sizes[l + 1]]);
            net.biases.push(vec![0.0; sizes[l + 1]]);
        }
        net
    }

    pub fn input_len(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_len(&self) -> usize {
        *self.sizes.last().expect("non-empty sizes")
    }

    pub fn param_count(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>() + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    /// Forward pass: tanh after every layer except the last.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, NetError> {
        if input.len() != self.input_len() {
            return Err(NetError::InputSize { got: input.len(), want: self.input_len() });
        }
        let mut act = input.to_vec();
        for l in 0..self.weights.len() {
            act = self.layer(l, &act, l + 1 < self.weights.len());
        }
        Ok(act)
    }

    fn layer(&self, l: usize, input: &[f64], tanh: bool) -> Vec<f64> {
        let n_in = self.sizes[l];
        let mut out = self.biases[l].clone();
        for (o, out_o) in out.iter_mut().enumerate() {
            let row = &self.weights[l][o * n_in..(o + 1) * n_in];
            *out_o += row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>();
            if tanh {
                *out_o = out_o.tanh();
            }
        }
        out
    }

    /// Reverse-mode gradient of `⟨output, output_grad⟩` with respect to all
    /// parameters, accumulated into `grads`. Returns the input gradient.
    pub fn backward(
        &self,
        input: &[f64],
        output_grad: &[f64],
        grads: &mut DenseGrads,
    ) -> Result<Vec<f64>, NetError> {
        if input.len() != self.input_len() {
            return Err(NetError::InputSize { got: input.len(), want: self.input_len() });
        }
        if output_grad.len() != self.output_len() {
            return Err(NetError::GradSize { got: output_grad.len(), want: self.output_len() });
        }
        // re-run forward, caching post-activation values per layer
        let n_layers = self.weights.len();
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(n_layers + 1);
        acts.push(input.to_vec());
        for l in 0..n_layers {
            let next = self.layer(l, &acts[l], l + 1 < n_layers);
            acts.push(next);
        }
        let mut delta = output_grad.to_vec();
        for l in (0..n_layers).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            if l + 1 < n_layers {
                // tanh'(z) = 1 - tanh(z)²; acts[l+1] holds tanh(z)
                for (d, a) in delta.iter_mut().zip(&acts[l + 1]) {
                    *d *= 1.0 - a * a;
                }
            }
            let input_l = &acts[l];
            for o in 0..n_out {
                grads.biases[l][o] += delta[o];
                let row = &mut grads.weights[l][o * n_in..(o + 1) * n_in];
                for (g, x) in row.iter_mut().zip(input_l) {
                    *g += delta[o] * x;
                }
            }
            let mut prev = vec![0.0; n_in];
            for o in 0..n_out {
                let row = &self.weights[l][o * n_in..(o + 1) * n_in];
                for (p, w) in prev.iter_mut().zip(row) {
                    *p += delta[o] * w;
                }
            }
            delta = prev;
        }
        Ok(delta)
    }

    /// Flat views over (weights, biases) for the optimizer.
    pub fn params_flat_mut(&mut self) -> Vec<&mut [f64]> {
        self.weights
            .iter_mut()
            .map(|w| w.as_mut_slice())
            .chain(self.biases.iter_mut().map(|b| b.as_mut_slice()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_net_zero_output() {
        let net = DenseNet::zeros(&[3, 4, 2]);
        assert_eq!(net.forward(&[1.0, -2.0, 0.5]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn identity_single_layer() {
        let mut net = DenseNet::zeros(&[3, 3]);
        for i in 0..3 {
            net.weights[0][i * 3 + i] = 1.0;
        }
        let x = [0.3, -0.7, 1.1];
        assert_eq!(net.forward(&x).unwrap(), x.to_vec());
    }

    #[test]
    fn forward_matches_independent_reimplementation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let net = DenseNet::new(&[4, 5, 3], &mut rng);
        let x = [0.2, -0.4, 0.8, -1.5];
        // independent re-evaluation of the affine+tanh chain
        let mut hidden = vec![0.0; 5];
        for o in 0..5 {
            let mut z = net.biases[0][o];
            for i in 0..4 {
                z += net.weights[0][o * 4 + i] * x[i];
            }
            hidden[o] = z.tanh();
        }
        let mut out = vec![0.0; 3];
        for o in 0..3 {
            let mut z = net.biases[1][o];
            for i in 0..5 {
                z += net.weights[1][o * 5 + i] * hidden[i];
            }
            out[o] = z;
        }
        let got = net.forward(&x).unwrap();
        for (a, b) in got.iter().zip(&out) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn input_size_mismatch_rejected() {
        let net = DenseNet::zeros(&[3, 2]);
        assert!(net.forward(&[1.0]).is_err());
        let mut g = DenseGrads::zeros_like(&net);
        assert!(net.backward(&[1.0, 2.0, 3.0], &[1.0], &mut g).is_err());
    }

    #[test]
    fn zero_output_grad_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = DenseNet::new(&[3, 4, 2], &mut rng);
        let mut g = DenseGrads::zeros_like(&net);
        net.backward(&[0.1, 0.2, 0.3], &[0.0, 0.0], &mut g).unwrap();
        assert!(g.weights.iter().flatten().all(|&v| v == 0.0));
        assert!(g.biases.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_layer_weight_gradient_is_input() {
        // loss = output[1] of a single linear layer: d/dW row 1 = input
        let net = DenseNet::zeros(&[3, 2]);
        let mut g = DenseGrads::zeros_like(&net);
        let x = [0.5, -1.0, 2.0];
        net.backward(&x, &[0.0, 1.0], &mut g).unwrap();
        assert_eq!(&g.weights[0][3..6], &x);
        assert_eq!(&g.weights[0][0..3], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut net = DenseNet::new(&[4, 6, 3], &mut rng);
        let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let og: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut grads = DenseGrads::zeros_like(&net);
        net.backward(&x, &og, &mut grads).unwrap();

        let h = 1e-5;
        let mut checked = 0;
        for l in 0..net.weights.len() {
            for i in (0..net.weights[l].len()).step_by(5) {
                let orig = net.weights[l][i];
                net.weights[l][i] = orig + h;
                let up: f64 = net.forward(&x).unwrap().iter().zip(&og).map(|(y, g)| y * g).sum();
                net.weights[l][i] = orig - h;
                let dn: f64 = net.forward(&x).unwrap().iter().zip(&og).map(|(y, g)| y * g).sum();
                net.weights[l][i] = orig;
                let fd = (up - dn) / (2.0 * h);
                let an = grads.weights[l][i];
                let denom = fd.abs().max(an.abs()).max(1e-8);
                assert!((fd - an).abs() / denom < 1e-4, "layer {l} idx {i}: fd {fd} vs an {an}");
                checked += 1;
            }
        }
        assert!(checked > 5);
    }
}
