//! Exact terminal distributions over an enumerated state space.

use crate::gfn::{class_policy, ClassEnv, FlowModel};

use super::{DistributionTable, EvalError, StateIndex};

/// `p(x) = R(x) / Σ R(x')` over the stop-legal states.
pub fn ground_truth<S>(index: &StateIndex<S>) -> DistributionTable {
    let z: f64 = index.rewards.iter().sum();
    index.rewards.iter().map(|r| r / z).collect()
}

/// Exact learned terminal distribution: a forward sweep in grade order,
/// pushing reach · P_F(class) to each successor (members of a class split
/// its probability uniformly) and reach · P_F(stop) into the terminal
/// table.
pub fn model_distribution<E, M>(
    index: &StateIndex<E::State>,
    model: &mut M,
) -> Result<DistributionTable, EvalError>
where
    E: ClassEnv,
    M: FlowModel<E::State>,
{
    let mut reach = vec![0.0; index.len()];
    let mut terminal = vec![0.0; index.len()];
    reach[index.topo[0]] = 1.0;
    for &i in &index.topo {
        if reach[i] == 0.0 {
            continue;
        }
        let classes = &index.classes[i];
        if classes.is_empty() {
            return Err(EvalError::Env(crate::gfn::GfnError::NoLegalActions));
        }
        let mults: Vec<u32> = classes.iter().map(|c| c.multiplicity).collect();
        let logits = model.forward_logits(&index.states[i]);
        let probs = class_policy(&logits, &mults)?;
        for (c, class) in classes.iter().enumerate() {
            if class.is_stop {
                terminal[i] += reach[i] * probs[c];
            } else {
                let members = &index.successors[i][c];
                let share = probs[c] / members.len() as f64;
                for &succ in members {
                    reach[succ] += reach[i] * share;
                }
            }
        }
    }
    debug_assert!((terminal.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    Ok(terminal)
}
