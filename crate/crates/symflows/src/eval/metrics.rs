//! Distribution metrics and the sliding sample window.

use std::collections::VecDeque;

use super::{DistributionTable, EvalError, StateIndex};

/// `Σ|p_i − q_i|`, in `[0, 2]`.
pub fn l1_distance(p: &DistributionTable, q: &DistributionTable) -> Result<f64, EvalError> {
    if p.len() != q.len() {
        return Err(EvalError::LengthMismatch(p.len(), q.len()));
    }
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}

/// Jensen-Shannon divergence `½KL(p‖m) + ½KL(q‖m)` with `m = (p+q)/2`,
/// natural log, `0·log 0 := 0`; in `[0, ln 2]`.
pub fn js_divergence(p: &DistributionTable, q: &DistributionTable) -> Result<f64, EvalError> {
    if p.len() != q.len() {
        return Err(EvalError::LengthMismatch(p.len(), q.len()));
    }
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        let m = 0.5 * (a + b);
        if a > 0.0 {
            acc += 0.5 * a * (a / m).ln();
        }
        if b > 0.0 {
            acc += 0.5 * b * (b / m).ln();
        }
    }
    Ok(acc.max(0.0))
}

/// Normalized counts of terminal-state indices.
pub fn empirical_distribution<S>(
    samples: &[usize],
    index: &StateIndex<S>,
) -> Result<DistributionTable, EvalError> {
    if samples.is_empty() {
        return Err(EvalError::EmptyWindow);
    }
    let mut counts = vec![0.0; index.len()];
    for &s in samples {
        if s >= index.len() {
            return Err(EvalError::UnknownKey);
        }
        counts[s] += 1.0;
    }
    let n = samples.len() as f64;
    Ok(counts.into_iter().map(|c| c / n).collect())
}

/// Sliding window over the most recent terminal samples, with O(1)
/// distribution and average-reward queries.
pub struct EmpiricalWindow {
    capacity: usize,
    entries: VecDeque<(usize, f64)>,
    counts: Vec<f64>,
    reward_sum: f64,
}

impl EmpiricalWindow {
    pub fn new(capacity: usize, n_states: usize) -> Self {
        assert!(capacity > 0);
        EmpiricalWindow {
            capacity,
            entries: VecDeque::new(),
            counts: vec![0.0; n_states],
            reward_sum: 0.0,
        }
    }

    pub fn push(&mut self, state: usize, reward: f64) {
        self.entries.push_back((state, reward));
        self.counts[state] += 1.0;
        self.reward_sum += reward;
        if self.entries.len() > self.capacity {
            let (old, r) = self.entries.pop_front().expect("non-empty");
            self.counts[old] -= 1.0;
            self.reward_sum -= r;
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn distribution(&self) -> Result<DistributionTable, EvalError> {
        if self.entries.is_empty() {
            return Err(EvalError::EmptyWindow);
        }
        let n = self.entries.len() as f64;
        Ok(self.counts.iter().map(|c| c / n).collect())
    }

    pub fn average_reward(&self) -> Result<f64, EvalError> {
        if self.entries.is_empty() {
            return Err(EvalError::EmptyWindow);
        }
        Ok(self.reward_sum / self.entries.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_examples() {
        assert_eq!(l1_distance(&vec![0.5, 0.5], &vec![0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(l1_distance(&vec![1.0, 0.0], &vec![0.0, 1.0]).unwrap(), 2.0);
        assert!((l1_distance(&vec![0.5, 0.5], &vec![0.25, 0.75]).unwrap() - 0.5).abs() < 1e-12);
        assert!(l1_distance(&vec![1.0], &vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn js_examples() {
        let ln2 = std::f64::consts::LN_2;
        assert_eq!(js_divergence(&vec![0.5, 0.5], &vec![0.5, 0.5]).unwrap(), 0.0);
        assert!((js_divergence(&vec![1.0, 0.0], &vec![0.0, 1.0]).unwrap() - ln2).abs() < 1e-12);
        // independent summation oracle for (0.5, 0.5) vs (1, 0):
        // m = (0.75, 0.25)
        // ½[0.5 ln(0.5/0.75) + 0.5 ln(0.5/0.25)] + ½[1 ln(1/0.75)]
        let expected = 0.5 * (0.5 * (0.5f64 / 0.75).ln() + 0.5 * (0.5f64 / 0.25).ln())
            + 0.5 * (1.0f64 / 0.75).ln();
        let got = js_divergence(&vec![0.5, 0.5], &vec![1.0, 0.0]).unwrap();
        assert!((got - expected).abs() < 1e-12);
        // symmetry
        let rev = js_divergence(&vec![1.0, 0.0], &vec![0.5, 0.5]).unwrap();
        assert_eq!(got, rev);
        assert!(got <= ln2);
    }

    #[test]
    fn window_slides() {
        let mut w = EmpiricalWindow::new(2, 3);
        w.push(0, 1.0);
        w.push(0, 1.0);
        assert_eq!(w.distribution().unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(w.average_reward().unwrap(), 1.0);
        w.push(1, 3.0);
        // window now holds the last two samples: one of each
        assert_eq!(w.distribution().unwrap(), vec![0.5, 0.5, 0.0]);
        assert_eq!(w.average_reward().unwrap(), 2.0);
    }
}
