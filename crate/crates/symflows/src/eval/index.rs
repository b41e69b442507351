//! Breadth-first closure of an environment's reachable canonical states,
//! with cached per-state class structure for the DP sweep.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use crate::gfn::{ClassDesc, ClassEnv};

use super::EvalError;

pub struct StateIndex<S> {
    pub states: Vec<S>,
    pub keys: Vec<Vec<u8>>,
    pub by_key: HashMap<Vec<u8>, usize>,
    pub grades: Vec<u64>,
    pub stop_legal: Vec<bool>,
    /// Reward where stop is legal, 0 elsewhere.
    pub rewards: Vec<f64>,
    pub classes: Vec<Vec<ClassDesc>>,
    /// Per state, per class: successor index of each member (empty for stop).
    pub successors: Vec<Vec<Vec<usize>>>,
    /// State indices in (grade, discovery) order; every edge goes forward.
    pub topo: Vec<usize>,
}

impl<S> StateIndex<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn terminal_count(&self) -> usize {
        self.stop_legal.iter().filter(|&&t| t).count()
    }

    pub fn index_of(&self, key: &[u8]) -> Result<usize, EvalError> {
        self.by_key.get(key).copied().ok_or(EvalError::UnknownKey)
    }

    /// Persists the canonical encodings, one hex line each, after header
    /// lines recording the environment config.
    pub fn write_keys(&self, w: &mut dyn Write, env_desc: &str) -> io::Result<()> {
        writeln!(w, "# symflows-state-index v1")?;
        writeln!(w, "# env = {env_desc}")?;
        writeln!(w, "# states = {}", self.len())?;
        for key in &self.keys {
            for b in key {
                write!(w, "{b:02x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Reads back the hex key lines of a persisted index.
pub fn read_keys(r: &mut dyn BufRead) -> io::Result<Vec<Vec<u8>>> {
    let mut keys = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.len() % 2 != 0 {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "odd hex line"));
        }
        let key: Result<Vec<u8>, _> =
            (0..line.len() / 2).map(|i| u8::from_str_radix(&line[2 * i..2 * i + 2], 16)).collect();
        keys.push(key.map_err(|_| io::Error::new(io::ErrorKind::InvalidData, "bad hex"))?);
    }
    Ok(keys)
}

/// Enumerates every reachable state by BFS with canonical-key dedup.
pub fn enumerate_states<E: ClassEnv>(env: &E, budget: usize) -> Result<StateIndex<E::State>, EvalError> {
    let mut index = StateIndex {
        states: Vec::new(),
        keys: Vec::new(),
        by_key: HashMap::new(),
        grades: Vec::new(),
        stop_legal: Vec::new(),
        rewards: Vec::new(),
        classes: Vec::new(),
        successors: Vec::new(),
        topo: Vec::new(),
    };
    let s0 = env.initial_state();
    push_state(env, &mut index, s0, budget)?;
    let mut head = 0;
    while head < index.len() {
        let classes = env.classes(&index.states[head]);
        let mut succ_rows: Vec<Vec<usize>> = Vec::with_capacity(classes.len());
        for (c, class) in classes.iter().enumerate() {
            if class.is_stop {
                succ_rows.push(Vec::new());
                continue;
            }
            let mut members = Vec::with_capacity(class.multiplicity as usize);
            for m in 0..class.multiplicity {
                let out = env.step(&index.states[head], c, m);
                let key = env.key(&out.state);
                let idx = match index.by_key.get(&key) {
                    Some(&i) => i,
                    None => push_state(env, &mut index, out.state, budget)?,
                };
                debug_assert!(index.grades[idx] > index.grades[head], "DAG grading violated");
                members.push(idx);
            }
            succ_rows.push(members);
        }
        index.classes[head] = classes;
        index.successors[head] = succ_rows;
        head += 1;
    }
    let mut topo: Vec<usize> = (0..index.len()).collect();
    topo.sort_by_key(|&i| (index.grades[i], i));
    index.topo = topo;
    Ok(index)
}

fn push_state<E: ClassEnv>(
    env: &E,
    index: &mut StateIndex<E::State>,
    s: E::State,
    budget: usize,
) -> Result<usize, EvalError> {
    if index.len() >= budget {
        return Err(EvalError::BudgetExceeded(budget));
    }
    let key = env.key(&s);
    let idx = index.len();
    index.by_key.insert(key.clone(), idx);
    index.keys.push(key);
    index.grades.push(env.grade(&s));
    let stop = env.stop_legal(&s);
    index.stop_legal.push(stop);
    index.rewards.push(if stop { env.reward(&s) } else { 0.0 });
    index.classes.push(Vec::new());
    index.successors.push(Vec::new());
    index.states.push(s);
    Ok(idx)
}
