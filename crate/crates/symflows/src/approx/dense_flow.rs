//! Dense-network flow model. The net maps the environment's state encoding
//! to a fixed slot layout `[forward slots | backward slots | log flow]`;
//! class logits are read through the environment's class→slot mapping as
//! the log-mean of member slot flows, so a class's multiplicity-weighted
//! probability is the summed probability of its members.

use std::io::{self, BufRead, Write};
use std::rc::Rc;

use rand::Rng;

use crate::gfn::{logsumexp, ClassEnv, FlowModel, GfnError};

use super::adam::{AdamParams, AdamState};
use super::dense::{DenseGrads, DenseNet};

pub struct DenseFlow<E: ClassEnv> {
    env: Rc<E>,
    net: DenseNet,
    grads: DenseGrads,
    adam: Vec<AdamState>,
    log_z: f64,
    g_log_z: f64,
    adam_log_z: AdamState,
    opt: AdamParams,
    log_z_lr_mult: f64,
}

impl<E: ClassEnv> DenseFlow<E> {
    pub fn new(env: Rc<E>, hidden: &[usize], lr: f64, log_z_lr_mult: f64, rng: &mut impl Rng) -> Self {
        let mut sizes = vec![env.input_len()];
        sizes.extend_from_slice(hidden);
        sizes.push(env.fwd_slots() + env.bwd_slots() + 1);
        let net = DenseNet::new(&sizes, rng);
        let grads = DenseGrads::zeros_like(&net);
        let adam = net
            .weights
            .iter()
            .map(|w| AdamState::new(w.len()))
            .chain(net.biases.iter().map(|b| AdamState::new(b.len())))
            .collect();
        DenseFlow {
            env,
            net,
            grads,
            adam,
            log_z: 0.0,
            g_log_z: 0.0,
            adam_log_z: AdamState::new(1),
            opt: AdamParams::with_lr(lr),
            log_z_lr_mult,
        }
    }

    pub fn param_count(&self) -> usize {
        self.net.param_count() + 1
    }

    fn outputs(&self, s: &E::State) -> Vec<f64> {
        self.net.forward(&self.env.encode(s)).expect("encoding matches input size")
    }

    /// Class logit = log of the mean member-slot flow, so that
    /// multiplicity · exp(logit) is the class's total flow.
    fn class_logits(&self, y: &[f64], slots: &[Vec<u32>], offset: usize) -> Vec<f64> {
        slots
            .iter()
            .map(|members| {
                let vals: Vec<f64> = members.iter().map(|&m| y[offset + m as usize]).collect();
                logsumexp(&vals) - (vals.len() as f64).ln()
            })
            .collect()
    }

    /// Distributes per-class gradients onto member slots by softmax weight
    /// and backpropagates through the net.
    fn accum_class_grads(&mut self, s: &E::State, grad: &[f64], slots: &[Vec<u32>], offset: usize) {
        let y = self.outputs(s);
        let mut out_grad = vec![0.0; y.len()];
        for (members, &g) in slots.iter().zip(grad) {
            if members.len() == 1 {
                out_grad[offset + members[0] as usize] += g;
                continue;
            }
            let vals: Vec<f64> = members.iter().map(|&m| y[offset + m as usize]).collect();
            let lse = logsumexp(&vals);
            for (&m, v) in members.iter().zip(&vals) {
                out_grad[offset + m as usize] += g * (v - lse).exp();
            }
        }
        self.net
            .backward(&self.env.encode(s), &out_grad, &mut self.grads)
            .expect("shapes match");
    }

    pub fn save(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "backend dense")?;
        writeln!(w, "log_z {}", hexf(self.log_z))?;
        writeln!(w, "layers {}", self.net.weights.len())?;
        for l in 0..self.net.weights.len() {
            write!(w, "w {}", self.net.weights[l].len())?;
            for v in &self.net.weights[l] {
                write!(w, " {}", hexf(*v))?;
            }
            writeln!(w)?;
            write!(w, "b {}", self.net.biases[l].len())?;
            for v in &self.net.biases[l] {
                write!(w, " {}", hexf(*v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn load(&mut self, r: &mut dyn BufRead) -> io::Result<()> {
        let mut lines = r.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != "backend dense" {
            return Err(bad("expected dense backend header"));
        }
        let lz = lines.next().transpose()?.ok_or_else(|| bad("missing log_z"))?;
        self.log_z = parse_hexf(lz.strip_prefix("log_z ").ok_or_else(|| bad("bad log_z line"))?)?;
        let nl: usize = lines
            .next()
            .transpose()?
            .and_then(|l| l.strip_prefix("layers ").map(str::to_string))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad layers line"))?;
        if nl != self.net.weights.len() {
            return Err(bad("layer count mismatch with configured architecture"));
        }
        for l in 0..nl {
            read_vec(&mut lines, "w", &mut self.net.weights[l])?;
            read_vec(&mut lines, "b", &mut self.net.biases[l])?;
        }
        Ok(())
    }
}

fn read_vec(
    lines: &mut impl Iterator<Item = io::Result<String>>,
    tag: &str,
    dst: &mut [f64],
) -> io::Result<()> {
    let line = lines.next().transpose()?.ok_or_else(|| bad("truncated checkpoint"))?;
    let mut tok = line.split_whitespace();
    if tok.next() != Some(tag) {
        return Err(bad("unexpected checkpoint tag"));
    }
    let n: usize = tok.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad length"))?;
    if n != dst.len() {
        return Err(bad("parameter shape mismatch"));
    }
    for v in dst.iter_mut() {
        *v = parse_hexf(tok.next().ok_or_else(|| bad("truncated vector"))?)?;
    }
    Ok(())
}

impl<E: ClassEnv> FlowModel<E::State> for DenseFlow<E> {
    fn forward_logits(&mut self, s: &E::State) -> Vec<f64> {
        let y = self.outputs(s);
        self.class_logits(&y, &self.env.fwd_class_slots(s), 0)
    }

    fn backward_logits(&mut self, s: &E::State) -> Vec<f64> {
        let y = self.outputs(s);
        let slots = self.env.bwd_class_slots(s);
        self.class_logits(&y, &slots, self.env.fwd_slots())
    }

    fn log_state_flow(&mut self, s: &E::State) -> f64 {
        let y = self.outputs(s);
        y[self.env.fwd_slots() + self.env.bwd_slots()]
    }

    fn log_z(&self) -> f64 {
        self.log_z
    }

    fn accum_forward_grad(&mut self, s: &E::State, grad: &[f64]) {
        let slots = self.env.fwd_class_slots(s);
        self.accum_class_grads(s, grad, &slots, 0);
    }

    fn accum_backward_grad(&mut self, s: &E::State, grad: &[f64]) {
        let slots = self.env.bwd_class_slots(s);
        let offset = self.env.fwd_slots();
        self.accum_class_grads(s, grad, &slots, offset);
    }

    fn accum_flow_grad(&mut self, s: &E::State, grad: f64) {
        let y = self.outputs(s);
        let mut out_grad = vec![0.0; y.len()];
        let idx = self.env.fwd_slots() + self.env.bwd_slots();
        out_grad[idx] = grad;
        self.net
            .backward(&self.env.encode(s), &out_grad, &mut self.grads)
            .expect("shapes match");
    }

    fn accum_log_z_grad(&mut self, grad: f64) {
        self.g_log_z += grad;
    }

    fn opt_step(&mut self) -> Result<(), GfnError> {
        let n_layers = self.net.weights.len();
        for l in 0..n_layers {
            self.adam[l].step(&mut self.net.weights[l], &self.grads.weights[l], &self.opt)?;
        }
        for l in 0..n_layers {
            self.adam[n_layers + l].step(&mut self.net.biases[l], &self.grads.biases[l], &self.opt)?;
        }
        self.grads.clear();
        if self.g_log_z != 0.0 {
            let cfg = AdamParams { lr: self.opt.lr * self.log_z_lr_mult, ..self.opt };
            let g = [self.g_log_z];
            let mut p = [self.log_z];
            self.adam_log_z.step(&mut p, &g, &cfg)?;
            self.log_z = p[0];
            self.g_log_z = 0.0;
        }
        Ok(())
    }
}

fn hexf(v: f64) -> String {
    format!("{:016x}", v.to_bits())
}

fn parse_hexf(s: &str) -> io::Result<f64> {
    u64::from_str_radix(s.trim(), 16)
        .map(f64::from_bits)
        .map_err(|_| bad("bad float bits"))
}

fn bad(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}
