//! Trajectory sampling under the ε-mixture training policy
//! `π = (1−ε)·P_F + ε·U` over action classes, then uniformly over concrete
//! members within the chosen class.

use rand::Rng;

use super::{class_policy, ClassEnv, FlowModel, GfnError};

/// One recorded move: the chosen class and member, plus (for non-stop
/// moves) the successor's backward class that undoes it.
#[derive(Clone, Copy, Debug)]
pub struct Step {
    pub class: usize,
    pub member: u32,
    pub backward_class: Option<usize>,
}

/// A complete trajectory: `states[0]` is the initial state, `steps[i]` is
/// the move taken from `states[i]`, and the final step is the stop action.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub states: Vec<S>,
    pub steps: Vec<Step>,
    pub reward: f64,
}

impl<S> Trajectory<S> {
    pub fn last_state(&self) -> &S {
        self.states.last().expect("non-empty trajectory")
    }

    /// Number of transitions including the stop action.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

fn sample_index(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Samples one complete trajectory. Deterministic given the rng state,
/// the model, and the environment. Errors if the walk exceeds `depth_cap`
/// transitions, which signals a broken environment DAG.
pub fn sample_trajectory<E, M>(
    env: &E,
    model: &mut M,
    epsilon: f64,
    rng: &mut impl Rng,
    depth_cap: usize,
) -> Result<Trajectory<E::State>, GfnError>
where
    E: ClassEnv,
    M: FlowModel<E::State>,
{
    debug_assert!((0.0..=1.0).contains(&epsilon));
    let mut states = vec![env.initial_state()];
    let mut steps: Vec<Step> = Vec::new();
    loop {
        if steps.len() > depth_cap {
            return Err(GfnError::DepthCapExceeded(depth_cap));
        }
        let s = states.last().expect("non-empty").clone();
        let classes = env.classes(&s);
        if classes.is_empty() {
            return Err(GfnError::NoLegalActions);
        }
        let mults: Vec<u32> = classes.iter().map(|c| c.multiplicity).collect();
        let pf = class_policy(&model.forward_logits(&s), &mults)?;
        let u = 1.0 / classes.len() as f64;
        let mixed: Vec<f64> = pf.iter().map(|p| (1.0 - epsilon) * p + epsilon * u).collect();
        let class = sample_index(&mixed, rng);
        if classes[class].is_stop {
            let reward = env.reward(&s);
            if reward <= 0.0 {
                return Err(GfnError::NonPositiveReward(reward));
            }
            steps.push(Step { class, member: 0, backward_class: None });
            return Ok(Trajectory { states, steps, reward });
        }
        let member = rng.gen_range(0..classes[class].multiplicity);
        let outcome = env.step(&s, class, member);
        steps.push(Step { class, member, backward_class: Some(outcome.backward_class) });
        states.push(outcome.state);
    }
}
