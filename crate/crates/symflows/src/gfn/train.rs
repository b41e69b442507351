//! The training loop: sample a batch of trajectories under the ε-mixture
//! policy, evaluate the configured criterion, backpropagate hand-computed
//! gradients into the model, and step the optimizer. Deterministic given
//! the seed (per-trajectory rng streams are derived, not shared).

use crate::seeds;

use super::{
    class_log_policy, class_policy, logsumexp, sample_trajectory, ClassEnv, FlowModel, GfnError,
    Trajectory,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossKind {
    Fm,
    Db,
    Tb,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Fm => "FM",
            LossKind::Db => "DB",
            LossKind::Tb => "TB",
        }
    }

    pub fn parse(s: &str) -> Option<LossKind> {
        match s.to_ascii_uppercase().as_str() {
            "FM" => Some(LossKind::Fm),
            "DB" => Some(LossKind::Db),
            "TB" => Some(LossKind::Tb),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub loss: LossKind,
    /// Uniform-mixture weight of the training policy, in [0, 1].
    pub epsilon: f64,
    pub batch_size: usize,
    pub steps: usize,
    pub seed: u64,
    /// Train the backward policy head; otherwise P_B is uniform over
    /// backward classes (multiplicity-weighted).
    pub learn_backward: bool,
}

/// Emitted once per optimizer step.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub step: usize,
    /// Cumulative count of states visited by sampled trajectories.
    pub states_visited: u64,
    pub loss: f64,
    /// Loss-specific scalar: log Z under TB, log F(s0) under DB, and the
    /// log total outflow of s0 under FM.
    pub aux: f64,
    /// (canonical key, reward) of each batch trajectory's terminal state.
    pub terminals: Vec<(Vec<u8>, f64)>,
}

/// Runs `cfg.steps` optimizer updates, invoking `on_step` after each.
pub fn train<E, M, F>(env: &E, model: &mut M, cfg: &TrainConfig, mut on_step: F) -> Result<(), GfnError>
where
    E: ClassEnv,
    M: FlowModel<E::State>,
    F: FnMut(&StepRecord, &mut M),
{
    debug_assert!((0.0..=1.0).contains(&cfg.epsilon));
    let depth_cap = 4 * env.max_len();
    let mut states_visited: u64 = 0;
    for step in 0..cfg.steps {
        let mut batch = Vec::with_capacity(cfg.batch_size);
        for b in 0..cfg.batch_size {
            let mut rng = seeds::indexed_stream(cfg.seed, "sample", step as u64, b as u64);
            let tau = sample_trajectory(env, model, cfg.epsilon, &mut rng, depth_cap)?;
            states_visited += tau.states.len() as u64;
            batch.push(tau);
        }
        let (loss, aux) = match cfg.loss {
            LossKind::Tb => tb_batch(env, model, cfg, &batch)?,
            LossKind::Db => db_batch(env, model, cfg, &batch)?,
            LossKind::Fm => fm_batch(env, model, &batch)?,
        };
        if !loss.is_finite() {
            return Err(GfnError::NonFiniteLoss { step, value: loss });
        }
        model.opt_step()?;
        let record = StepRecord {
            step,
            states_visited,
            loss,
            aux,
            terminals: batch
                .iter()
                .map(|t| (env.key(t.last_state()), t.reward))
                .collect(),
        };
        on_step(&record, model);
    }
    Ok(())
}

fn forward_mults<E: ClassEnv>(env: &E, s: &E::State) -> Vec<u32> {
    env.classes(s).iter().map(|c| c.multiplicity).collect()
}

fn backward_mults<E: ClassEnv>(env: &E, s: &E::State) -> Vec<u32> {
    env.backward(s).iter().map(|c| c.multiplicity()).collect()
}

/// Log backward policy over the backward classes of `s`, either learned or
/// uniform (zero logits through the multiplicity-weighted softmax).
fn log_pb<E, M>(env: &E, model: &mut M, learn: bool, s: &E::State) -> Result<(Vec<f64>, Vec<f64>), GfnError>
where
    E: ClassEnv,
    M: FlowModel<E::State>,
{
    let mults = backward_mults(env, s);
    let logits = if learn { model.backward_logits(s) } else { vec![0.0; mults.len()] };
    let logp = class_log_policy(&logits, &mults)?;
    Ok((logp, class_policy(&logits, &mults)?))
}

fn tb_batch<E, M>(
    env: &E,
    model: &mut M,
    cfg: &TrainConfig,
    batch: &[Trajectory<E::State>],
) -> Result<(f64, f64), GfnError>
where
    E: ClassEnv,
    M: FlowModel<E::State>,
{
    let scale = 1.0 / batch.len() as f64;
    let mut total = 0.0;
    for tau in batch {
        // forward pass: collect the trajectory's log-likelihood pieces
        let mut log_pf_sum = 0.0;
        let mut pf_probs = Vec::with_capacity(tau.states.len());
        for (s, step) in tau.states.iter().zip(&tau.steps) {
            let mults = forward_mults(env, s);
            let logits = model.forward_logits(s);
            let logp = class_log_policy(&logits, &mults)?;
            log_pf_sum += logp[step.class];
            pf_probs.push(class_policy(&logits, &mults)?);
        }
        let mut log_pb_sum = 0.0;
        let mut pb_probs = Vec::with_capacity(tau.steps.len());
        for (i, step) in tau.steps.iter().enumerate() {
            if let Some(b) = step.backward_class {
                let s_next = &tau.states[i + 1];
                let (logp, probs) = log_pb(env, model, cfg.learn_backward, s_next)?;
                log_pb_sum += logp[b];
                pb_probs.push(probs);
            }
        }
        let delta = (model.log_z() + log_pf_sum) - (tau.reward.ln() + log_pb_sum);
        total += delta * delta;

        // gradient pass
        let g = 2.0 * delta * scale;
        model.accum_log_z_grad(g);
        for ((s, step), probs) in tau.states.iter().zip(&tau.steps).zip(&pf_probs) {
            let mut grad: Vec<f64> = probs.iter().map(|p| -g * p).collect();
            grad[step.class] += g;
            model.accum_forward_grad(s, &grad);
        }
        if cfg.learn_backward {
            let mut bi = 0;
            for (i, step) in tau.steps.iter().enumerate() {
                if let Some(b) = step.backward_class {
                    let probs = &pb_probs[bi];
                    bi += 1;
                    let mut grad: Vec<f64> = probs.iter().map(|p| g * p).collect();
                    grad[b] -= g;
                    model.accum_backward_grad(&tau.states[i + 1], &grad);
                }
            }
        }
    }
    Ok((total * scale, model.log_z()))
}

fn db_batch<E, M>(
    env: &E,
    model: &mut M,
    cfg: &TrainConfig,
    batch: &[Trajectory<E::State>],
) -> Result<(f64, f64), GfnError>
where
    E: ClassEnv,
    M: FlowModel<E::State>,
{
    // every transition plus the terminal stop edge contributes one term
    let n_terms: usize = batch.iter().map(|t| t.steps.len()).sum();
    let scale = 1.0 / n_terms as f64;
    let mut total = 0.0;
    for tau in batch {
        for (i, step) in tau.steps.iter().enumerate() {
            let s = &tau.states[i];
            let mults = forward_mults(env, s);
            let logits = model.forward_logits(s);
            let logp = class_log_policy(&logits, &mults)?;
            let probs = class_policy(&logits, &mults)?;
            let log_f_s = model.log_state_flow(s);

            let delta = match step.backward_class {
                Some(b) => {
                    let s_next = &tau.states[i + 1];
                    let (logp_b, _) = log_pb(env, model, cfg.learn_backward, s_next)?;
                    (log_f_s + logp[step.class])
                        - (model.log_state_flow(s_next) + logp_b[b])
                }
                // stop edge: F(s)·P_F(stop|s) must match R(s)
                None => log_f_s + logp[step.class] - tau.reward.ln(),
            };
            total += delta * delta;

            let g = 2.0 * delta * scale;
            model.accum_flow_grad(s, g);
            let mut grad: Vec<f64> = probs.iter().map(|p| -g * p).collect();
            grad[step.class] += g;
            model.accum_forward_grad(s, &grad);
            if let Some(b) = step.backward_class {
                let s_next = &tau.states[i + 1];
                model.accum_flow_grad(s_next, -g);
                if cfg.learn_backward {
                    let (_, probs_b) = log_pb(env, model, true, s_next)?;
                    let mut grad: Vec<f64> = probs_b.iter().map(|p| g * p).collect();
                    grad[b] -= g;
                    model.accum_backward_grad(s_next, &grad);
                }
            }
        }
    }
    let aux = model.log_state_flow(&env.initial_state());
    Ok((total * scale, aux))
}

fn fm_batch<E, M>(
    env: &E,
    model: &mut M,
    batch: &[Trajectory<E::State>],
) -> Result<(f64, f64), GfnError>
where
    E: ClassEnv,
    M: FlowModel<E::State>,
{
    // forward logits double as log edge flows per class member here
    let n_terms: usize = batch.iter().map(|t| t.steps.len()).sum();
    let scale = 1.0 / n_terms as f64;
    let mut total = 0.0;
    for tau in batch {
        let last = tau.states.len() - 1;
        for (i, s) in tau.states.iter().enumerate() {
            if i > 0 {
                // interior matching at every non-initial visited state
                let backward = env.backward(s);
                let mut in_entries: Vec<(E::State, usize, f64, usize)> = Vec::new();
                for class in &backward {
                    for (parent, fclass, count) in &class.links {
                        let logits = model.forward_logits(parent);
                        let l = logits[*fclass] + f64::from(*count).ln();
                        in_entries.push((parent.clone(), *fclass, l, logits.len()));
                    }
                }
                if in_entries.is_empty() {
                    return Err(GfnError::EmptyFlowList);
                }
                let classes = env.classes(s);
                let logits = model.forward_logits(s);
                let out_entries: Vec<f64> = classes
                    .iter()
                    .zip(&logits)
                    .map(|(c, l)| l + f64::from(c.multiplicity).ln())
                    .collect();
                let log_in: Vec<f64> = in_entries.iter().map(|e| e.2).collect();
                let lse_in = logsumexp(&log_in);
                let lse_out = logsumexp(&out_entries);
                let delta = lse_in - lse_out;
                total += delta * delta;

                let g = 2.0 * delta * scale;
                for (parent, fclass, l, n) in &in_entries {
                    let w = (l - lse_in).exp();
                    let mut grad = vec![0.0; *n];
                    grad[*fclass] = g * w;
                    model.accum_forward_grad(parent, &grad);
                }
                let grad: Vec<f64> = out_entries.iter().map(|l| -g * (l - lse_out).exp()).collect();
                model.accum_forward_grad(s, &grad);
            }
            if i == last {
                // the stop edge flow of the terminal state must match R
                let classes = env.classes(s);
                let stop = classes.iter().position(|c| c.is_stop).ok_or(GfnError::IllegalStop)?;
                let logits = model.forward_logits(s);
                let delta = logits[stop] - tau.reward.ln();
                total += delta * delta;
                let mut grad = vec![0.0; classes.len()];
                grad[stop] = 2.0 * delta * scale;
                model.accum_forward_grad(s, &grad);
            }
        }
    }
    let s0 = env.initial_state();
    let classes = env.classes(&s0);
    let logits = model.forward_logits(&s0);
    let out: Vec<f64> = classes
        .iter()
        .zip(&logits)
        .map(|(c, l)| l + f64::from(c.multiplicity).ln())
        .collect();
    Ok((total * scale, logsumexp(&out)))
}
