//! Exact tabular flow model keyed by canonical state encodings. Lookup of
//! an unseen state materializes zero-initialized entries (uniform policy,
//! unit flow) exactly once; updates are sparse-Adam over touched entries.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::rc::Rc;

use crate::gfn::{ClassEnv, FlowModel, GfnError};

use super::adam::{AdamParams, AdamState};

struct TabEntry {
    fwd: Vec<f64>,
    bwd: Vec<f64>,
    flow: [f64; 1],
    g_fwd: Vec<f64>,
    g_bwd: Vec<f64>,
    g_flow: f64,
    adam_fwd: AdamState,
    adam_bwd: AdamState,
    adam_flow: AdamState,
    dirty: bool,
}

impl TabEntry {
    fn new(n_fwd: usize, n_bwd: usize) -> Self {
        TabEntry {
            fwd: vec![0.0; n_fwd],
            bwd: vec![0.0; n_bwd],
            flow: [0.0],
            g_fwd: vec![0.0; n_fwd],
            g_bwd: vec![0.0; n_bwd],
            g_flow: 0.0,
            adam_fwd: AdamState::new(n_fwd),
            adam_bwd: AdamState::new(n_bwd),
            adam_flow: AdamState::new(1),
            dirty: false,
        }
    }
}

pub struct TabularFlow<E: ClassEnv> {
    env: Rc<E>,
    entries: HashMap<Vec<u8>, TabEntry>,
    touched: Vec<Vec<u8>>,
    log_z: f64,
    g_log_z: f64,
    adam_log_z: AdamState,
    opt: AdamParams,
    log_z_lr_mult: f64,
}

impl<E: ClassEnv> TabularFlow<E> {
    pub fn new(env: Rc<E>, lr: f64, log_z_lr_mult: f64) -> Self {
        TabularFlow {
            env,
            entries: HashMap::new(),
            touched: Vec::new(),
            log_z: 0.0,
            g_log_z: 0.0,
            adam_log_z: AdamState::new(1),
            opt: AdamParams::with_lr(lr),
            log_z_lr_mult,
        }
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    fn entry(&mut self, s: &E::State) -> (&mut TabEntry, Vec<u8>) {
        let key = self.env.key(s);
        if !self.entries.contains_key(&key) {
            let n_fwd = self.env.classes(s).len();
            let n_bwd = self.env.backward(s).len();
            self.entries.insert(key.clone(), TabEntry::new(n_fwd, n_bwd));
        }
        (self.entries.get_mut(&key).expect("just inserted"), key)
    }

    fn mark(&mut self, key: Vec<u8>) {
        let entry = self.entries.get_mut(&key).expect("entry exists");
        if !entry.dirty {
            entry.dirty = true;
            self.touched.push(key);
        }
    }

    /// Serializes all parameters, entries sorted by key for byte stability.
    pub fn save(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "backend tabular")?;
        writeln!(w, "log_z {}", hexf(self.log_z))?;
        writeln!(w, "entries {}", self.entries.len())?;
        let mut keys: Vec<&Vec<u8>> = self.entries.keys().collect();
        keys.sort();
        for key in keys {
            let e = &self.entries[key];
            write!(w, "e {}", hex(key))?;
            write!(w, " f {}", e.fwd.len())?;
            for v in &e.fwd {
                write!(w, " {}", hexf(*v))?;
            }
            write!(w, " b {}", e.bwd.len())?;
            for v in &e.bwd {
                write!(w, " {}", hexf(*v))?;
            }
            writeln!(w, " s {}", hexf(e.flow[0]))?;
        }
        Ok(())
    }

    /// Restores parameters written by [`TabularFlow::save`]. Optimizer
    /// state starts fresh.
    pub fn load(&mut self, r: &mut dyn BufRead) -> io::Result<()> {
        let mut lines = r.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != "backend tabular" {
            return Err(bad("expected tabular backend header"));
        }
        let lz = lines.next().transpose()?.ok_or_else(|| bad("missing log_z"))?;
        self.log_z = parse_hexf(lz.strip_prefix("log_z ").ok_or_else(|| bad("bad log_z line"))?)?;
        let count_line = lines.next().transpose()?.ok_or_else(|| bad("missing entries"))?;
        let n: usize = count_line
            .strip_prefix("entries ")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad entries line"))?;
        self.entries.clear();
        self.touched.clear();
        for _ in 0..n {
            let line = lines.next().transpose()?.ok_or_else(|| bad("truncated entry list"))?;
            let mut tok = line.split_whitespace();
            expect(&mut tok, "e")?;
            let key = unhex(tok.next().ok_or_else(|| bad("missing key"))?)?;
            expect(&mut tok, "f")?;
            let nf: usize = tok.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad fwd len"))?;
            let mut entry = TabEntry::new(nf, 0);
            for v in entry.fwd.iter_mut() {
                *v = parse_hexf(tok.next().ok_or_else(|| bad("truncated fwd"))?)?;
            }
            expect(&mut tok, "b")?;
            let nb: usize = tok.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad bwd len"))?;
            entry.bwd = vec![0.0; nb];
            entry.g_bwd = vec![0.0; nb];
            entry.adam_bwd = AdamState::new(nb);
            for v in entry.bwd.iter_mut() {
                *v = parse_hexf(tok.next().ok_or_else(|| bad("truncated bwd"))?)?;
            }
            expect(&mut tok, "s")?;
            entry.flow[0] = parse_hexf(tok.next().ok_or_else(|| bad("missing flow"))?)?;
            self.entries.insert(key, entry);
        }
        Ok(())
    }
}

impl<E: ClassEnv> FlowModel<E::State> for TabularFlow<E> {
    fn forward_logits(&mut self, s: &E::State) -> Vec<f64> {
        self.entry(s).0.fwd.clone()
    }

    fn backward_logits(&mut self, s: &E::State) -> Vec<f64> {
        self.entry(s).0.bwd.clone()
    }

    fn log_state_flow(&mut self, s: &E::State) -> f64 {
        self.entry(s).0.flow[0]
    }

    fn log_z(&self) -> f64 {
        self.log_z
    }

    fn accum_forward_grad(&mut self, s: &E::State, grad: &[f64]) {
        let (entry, key) = self.entry(s);
        for (g, d) in entry.g_fwd.iter_mut().zip(grad) {
            *g += d;
        }
        self.mark(key);
    }

    fn accum_backward_grad(&mut self, s: &E::State, grad: &[f64]) {
        let (entry, key) = self.entry(s);
        for (g, d) in entry.g_bwd.iter_mut().zip(grad) {
            *g += d;
        }
        self.mark(key);
    }

    fn accum_flow_grad(&mut self, s: &E::State, grad: f64) {
        let (entry, key) = self.entry(s);
        entry.g_flow += grad;
        self.mark(key);
    }

    fn accum_log_z_grad(&mut self, grad: f64) {
        self.g_log_z += grad;
    }

    fn opt_step(&mut self) -> Result<(), GfnError> {
        let keys = std::mem::take(&mut self.touched);
        for key in keys {
            let entry = self.entries.get_mut(&key).expect("touched entry exists");
            entry.adam_fwd.step(&mut entry.fwd, &entry.g_fwd, &self.opt)?;
            entry.adam_bwd.step(&mut entry.bwd, &entry.g_bwd, &self.opt)?;
            let g = [entry.g_flow];
            entry.adam_flow.step(&mut entry.flow, &g, &self.opt)?;
            entry.g_fwd.fill(0.0);
            entry.g_bwd.fill(0.0);
            entry.g_flow = 0.0;
            entry.dirty = false;
        }
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

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn unhex(s: &str) -> io::Result<Vec<u8>> {
    if s.len() % 2 != 0 {
        return Err(bad("odd hex length"));
    }
    (0..s.len() / 2)
        .map(|i| u8::from_str_radix(&s[2 * i..2 * i + 2], 16).map_err(|_| bad("bad hex")))
        .collect()
}

fn hexf(v: f64) -> String {
    format!("{:016x}", v.to_bits())
}

fn parse_hexf(s: &str) -> io::Result<f64> {
    u64::from_str_radix(s.trim(), 16)
        .map(f64::from_bits)
        .map_err(|_| bad("bad float bits"))
}

fn expect<'a>(tok: &mut impl Iterator<Item = &'a str>, want: &str) -> io::Result<()> {
    match tok.next() {
        Some(t) if t == want => Ok(()),
        _ => Err(bad("malformed checkpoint entry")),
    }
}

fn bad(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}
