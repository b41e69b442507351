//! Exhaustive benchmark of PE-based action partitioning against the exact
//! isomorphism oracle, over every (state, non-stop action) pair of a state
//! list.
//!
//! A pair counts as an error when the PE class of its action differs, as a
//! set of actions, from the oracle class.

use std::time::Instant;

use super::canon::CanonError;
use super::classes::{action_classes_oracle, action_classes_pe, ActionClass, GraphAction};
use super::graph::ColoredGraph;
use super::pe::PeConfig;

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub config: String,
    pub pairs: u64,
    pub errors: u64,
    pub elapsed_ms: u64,
}

impl BenchReport {
    pub fn error_rate(&self) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            self.errors as f64 / self.pairs as f64
        }
    }
}

fn class_ids(classes: &[ActionClass], n_actions: usize) -> Vec<u32> {
    let mut ids = vec![0u32; n_actions];
    for (cid, class) in classes.iter().enumerate() {
        for &m in &class.members {
            ids[m] = cid as u32;
        }
    }
    ids
}

/// Errors for one state: actions whose oracle member set differs from the
/// PE member set. Two partitions assign the same member set to action `a`
/// iff the classes containing `a` have equal size and full overlap.
fn count_errors(oracle: &[ActionClass], pe: &[ActionClass], n_actions: usize) -> u64 {
    let oid = class_ids(oracle, n_actions);
    let pid = class_ids(pe, n_actions);
    let o_size: Vec<u32> = oracle.iter().map(|c| c.multiplicity()).collect();
    let p_size: Vec<u32> = pe.iter().map(|c| c.multiplicity()).collect();
    let mut overlap = vec![0u32; oracle.len() * pe.len()];
    for a in 0..n_actions {
        overlap[oid[a] as usize * pe.len() + pid[a] as usize] += 1;
    }
    (0..n_actions)
        .filter(|&a| {
            let (o, p) = (oid[a] as usize, pid[a] as usize);
            !(o_size[o] == p_size[p] && overlap[o * pe.len() + p] == o_size[o])
        })
        .count() as u64
}

/// Runs every config against the oracle on the given states. `actions_of`
/// must return the legal non-stop actions of a state. `threads` shards the
/// state list; totals are order-independent sums, so counts are identical
/// at any worker count.
pub fn pe_benchmark<F>(
    states: &[ColoredGraph],
    configs: &[(String, PeConfig)],
    actions_of: F,
    threads: usize,
) -> Result<Vec<BenchReport>, CanonError>
where
    F: Fn(&ColoredGraph) -> Vec<GraphAction> + Sync,
{
    let actions: Vec<Vec<GraphAction>> = states.iter().map(&actions_of).collect();
    let oracle: Vec<Vec<ActionClass>> = states
        .iter()
        .zip(&actions)
        .map(|(g, acts)| action_classes_oracle(g, acts))
        .collect::<Result<_, _>>()?;
    let pairs: u64 = actions.iter().map(|a| a.len() as u64).sum();

    let mut out = Vec::with_capacity(configs.len());
    for (name, cfg) in configs {
        let start = Instant::now();
        let errors = if threads <= 1 {
            shard_errors(states, &actions, &oracle, cfg, 0, states.len())
        } else {
            let chunk = states.len().div_ceil(threads);
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..threads)
                    .map(|t| {
                        let lo = (t * chunk).min(states.len());
                        let hi = ((t + 1) * chunk).min(states.len());
                        let (states, actions, oracle) = (&states, &actions, &oracle);
                        scope.spawn(move || shard_errors(states, actions, oracle, cfg, lo, hi))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("bench worker")).sum()
            })
        };
        out.push(BenchReport {
            config: name.clone(),
            pairs,
            errors,
            elapsed_ms: start.elapsed().as_millis() as u64,
        });
    }
    Ok(out)
}

fn shard_errors(
    states: &[ColoredGraph],
    actions: &[Vec<GraphAction>],
    oracle: &[Vec<ActionClass>],
    cfg: &PeConfig,
    lo: usize,
    hi: usize,
) -> u64 {
    (lo..hi)
        .map(|i| {
            let pe = action_classes_pe(&states[i], &actions[i], cfg);
            count_errors(&oracle[i], &pe, actions[i].len())
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphsym::pe::PeLevel;

    #[test]
    fn identical_partitions_no_errors() {
        let g = ColoredGraph::with_colors(vec![0]);
        let acts = vec![
            GraphAction::AddNode { attach: 0, color: 0 },
            GraphAction::AddNode { attach: 0, color: 1 },
        ];
        let oracle = action_classes_oracle(&g, &acts).unwrap();
        assert_eq!(count_errors(&oracle, &oracle, acts.len()), 0);
    }

    #[test]
    fn merged_class_counts_all_members() {
        let o = vec![ActionClass { members: vec![0] }, ActionClass { members: vec![1] }];
        let p = vec![ActionClass { members: vec![0, 1] }];
        assert_eq!(count_errors(&o, &p, 2), 2);
    }

    #[test]
    fn thread_count_does_not_change_totals() {
        let tri = ColoredGraph::from_edges(vec![0, 0, 1], &[(0, 1), (1, 2), (0, 2)]);
        let states = vec![ColoredGraph::with_colors(vec![0]), tri];
        let actions_of = |g: &ColoredGraph| -> Vec<GraphAction> {
            let mut acts = Vec::new();
            for attach in 0..g.n() {
                for color in 0..2 {
                    acts.push(GraphAction::AddNode { attach, color });
                }
            }
            acts
        };
        let cfgs = vec![(
            "rw+edge".to_string(),
            PeConfig { level: PeLevel::Graph, ..PeConfig::from_components("rw+edge").unwrap() },
        )];
        let one = pe_benchmark(&states, &cfgs, actions_of, 1).unwrap();
        let four = pe_benchmark(&states, &cfgs, actions_of, 4).unwrap();
        assert_eq!(one[0].pairs, four[0].pairs);
        assert_eq!(one[0].errors, four[0].errors);
    }
}
