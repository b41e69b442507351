//! Experiment orchestration: build the environment and model from a parsed
//! config, train with periodic exact evaluation, and write the metrics CSV,
//! final checkpoint, and resolved config.

use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::rc::Rc;

use thiserror::Error;

use crate::approx::{DenseFlow, TabularFlow};
use crate::checkpoint;
use crate::config::{Backend, EnvConfig, EvalSettings, ExperimentConfig, TrainSettings};
use crate::csvout::MetricsCsv;
use crate::eval::{
    enumerate_states, ground_truth, js_divergence, l1_distance, model_distribution,
    DistributionTable, EmpiricalWindow, EvalError, StateIndex,
};
use crate::gfn::{train, ClassEnv, FlowModel, GfnError, TrainConfig};
use crate::graphenv::GraphEnv;
use crate::hypergrid::{HypergridEnv, SymmetrizedGrid};
use crate::seeds;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Gfn(#[from] GfnError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug)]
pub struct EvalPoint {
    pub step: usize,
    pub states_visited: u64,
    pub l1: Option<f64>,
    pub jsd: Option<f64>,
    pub avg_reward: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub final_loss: f64,
    pub states_visited: u64,
    pub evals: Vec<EvalPoint>,
    pub out_dir: PathBuf,
}

impl RunSummary {
    pub fn last_eval(&self) -> Option<&EvalPoint> {
        self.evals.last()
    }
}

enum MetricKind {
    /// Empirical sampled distribution vs ground truth, L1.
    HypergridL1,
    /// Exact DP distribution vs ground truth (JS) plus windowed reward.
    GraphJsd,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary, RunError> {
    let out_dir = PathBuf::from(&cfg.output.dir);
    fs::create_dir_all(&out_dir)?;
    fs::write(out_dir.join("resolved.cfg"), cfg.to_string())?;

    let summary = match &cfg.env {
        EnvConfig::Hypergrid { horizon, dim, r0, symmetry } => {
            let env = Rc::new(HypergridEnv::new(*horizon, *dim, *r0));
            let index = enumerate_states(env.as_ref(), cfg.eval.state_budget)?;
            let gt = ground_truth(&index);
            match cfg.train.backend {
                Backend::Tabular => {
                    let base = TabularFlow::new(
                        Rc::clone(&env),
                        cfg.train.learning_rate,
                        cfg.train.log_z_lr_mult,
                    );
                    let mut model = SymmetrizedGrid::new(base, *symmetry, *dim, *horizon);
                    let summary = drive(
                        env.as_ref(),
                        &mut model,
                        &cfg.train,
                        &cfg.eval,
                        &index,
                        &gt,
                        MetricKind::HypergridL1,
                        &out_dir,
                    )?;
                    checkpoint::write_checkpoint(&out_dir.join("model.ckpt"), |w| {
                        model.base().save(w)
                    })?;
                    summary
                }
                Backend::Dense => {
                    let mut rng = seeds::named_stream(cfg.train.seed, "init");
                    let base = DenseFlow::new(
                        Rc::clone(&env),
                        &cfg.train.hidden,
                        cfg.train.learning_rate,
                        cfg.train.log_z_lr_mult,
                        &mut rng,
                    );
                    let mut model = SymmetrizedGrid::new(base, *symmetry, *dim, *horizon);
                    let summary = drive(
                        env.as_ref(),
                        &mut model,
                        &cfg.train,
                        &cfg.eval,
                        &index,
                        &gt,
                        MetricKind::HypergridL1,
                        &out_dir,
                    )?;
                    checkpoint::write_checkpoint(&out_dir.join("model.ckpt"), |w| {
                        model.base().save(w)
                    })?;
                    summary
                }
            }
        }
        EnvConfig::Graph(gcfg) => {
            let env = Rc::new(GraphEnv::new(gcfg.clone()));
            let index = enumerate_states(env.as_ref(), cfg.eval.state_budget)?;
            let gt = ground_truth(&index);
            match cfg.train.backend {
                Backend::Tabular => {
                    let mut model = TabularFlow::new(
                        Rc::clone(&env),
                        cfg.train.learning_rate,
                        cfg.train.log_z_lr_mult,
                    );
                    let summary = drive(
                        env.as_ref(),
                        &mut model,
                        &cfg.train,
                        &cfg.eval,
                        &index,
                        &gt,
                        MetricKind::GraphJsd,
                        &out_dir,
                    )?;
                    checkpoint::write_checkpoint(&out_dir.join("model.ckpt"), |w| model.save(w))?;
                    summary
                }
                Backend::Dense => {
                    let mut rng = seeds::named_stream(cfg.train.seed, "init");
                    let mut model = DenseFlow::new(
                        Rc::clone(&env),
                        &cfg.train.hidden,
                        cfg.train.learning_rate,
                        cfg.train.log_z_lr_mult,
                        &mut rng,
                    );
                    let summary = drive(
                        env.as_ref(),
                        &mut model,
                        &cfg.train,
                        &cfg.eval,
                        &index,
                        &gt,
                        MetricKind::GraphJsd,
                        &out_dir,
                    )?;
                    checkpoint::write_checkpoint(&out_dir.join("model.ckpt"), |w| model.save(w))?;
                    summary
                }
            }
        }
    };
    Ok(summary)
}

#[allow(clippy::too_many_arguments)]
fn drive<E, M>(
    env: &E,
    model: &mut M,
    train_cfg: &TrainSettings,
    eval_cfg: &EvalSettings,
    index: &StateIndex<E::State>,
    gt: &DistributionTable,
    kind: MetricKind,
    out_dir: &Path,
) -> Result<RunSummary, RunError>
where
    E: ClassEnv,
    M: FlowModel<E::State>,
{
    let mut csv = MetricsCsv::new(BufWriter::new(File::create(out_dir.join("metrics.csv"))?))?;
    let gfn_cfg = TrainConfig {
        loss: train_cfg.loss,
        epsilon: train_cfg.epsilon,
        batch_size: train_cfg.batch_size,
        steps: train_cfg.steps,
        seed: train_cfg.seed,
        learn_backward: train_cfg.learn_backward,
    };
    let mut window = EmpiricalWindow::new(eval_cfg.window, index.len());
    let mut evals: Vec<EvalPoint> = Vec::new();
    let mut final_loss = 0.0;
    let mut states_visited = 0;
    let mut deferred: Option<RunError> = None;

    train(env, model, &gfn_cfg, |record, model| {
        final_loss = record.loss;
        states_visited = record.states_visited;
        for (key, reward) in &record.terminals {
            match index.index_of(key) {
                Ok(idx) => window.push(idx, *reward),
                Err(e) => {
                    if deferred.is_none() {
                        deferred = Some(e.into());
                    }
                }
            }
        }
        let is_eval =
            (record.step + 1) % eval_cfg.every == 0 || record.step + 1 == gfn_cfg.steps;
        let (mut l1, mut jsd, mut avg) = (None, None, None);
        if is_eval && deferred.is_none() {
            let outcome: Result<(), RunError> = (|| {
                match kind {
                    MetricKind::HypergridL1 => {
                        l1 = Some(l1_distance(&window.distribution()?, gt)?);
                    }
                    MetricKind::GraphJsd => {
                        let p = model_distribution::<E, M>(index, model)?;
                        jsd = Some(js_divergence(gt, &p)?);
                        avg = Some(window.average_reward()?);
                    }
                }
                Ok(())
            })();
            if let Err(e) = outcome {
                deferred = Some(e);
            } else {
                evals.push(EvalPoint {
                    step: record.step,
                    states_visited: record.states_visited,
                    l1,
                    jsd,
                    avg_reward: avg,
                });
            }
        }
        if deferred.is_none() {
            if let Err(e) =
                csv.row(record.step, record.states_visited, record.loss, record.aux, l1, jsd, avg)
            {
                deferred = Some(e.into());
            }
        }
    })?;
    if let Some(e) = deferred {
        return Err(e);
    }
    csv.into_inner().into_inner().map_err(|e| RunError::Io(e.into_error()))?.sync_all().ok();
    Ok(RunSummary { final_loss, states_visited, evals, out_dir: out_dir.to_path_buf() })
}
