//! Flat `key = value` experiment configs with `[section]` headers.
//! Unknown sections and keys are rejected with line-level diagnostics, and
//! every run writes back a resolved copy that reparses to the identical
//! run plan.

use std::fmt;

use thiserror::Error;

use crate::gfn::LossKind;
use crate::graphenv::{GraphEnvConfig, GraphSymmetry, RewardKind};
use crate::graphsym::pe::{PeConfig, PeLevel};
use crate::graphsym::rwpe::RwOrientation;
use crate::hypergrid::GridSymmetry;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ConfigError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError { line, msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EnvConfig {
    Hypergrid { horizon: usize, dim: usize, r0: f64, symmetry: GridSymmetry },
    Graph(GraphEnvConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Tabular,
    Dense,
}

impl Backend {
    fn name(self) -> &'static str {
        match self {
            Backend::Tabular => "tabular",
            Backend::Dense => "dense",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainSettings {
    pub loss: LossKind,
    pub epsilon: f64,
    pub batch_size: usize,
    pub steps: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub backend: Backend,
    pub hidden: Vec<usize>,
    pub learn_backward: bool,
    pub log_z_lr_mult: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalSettings {
    /// Metric cadence in optimizer steps.
    pub every: usize,
    /// Sliding-window size over sampled terminal states.
    pub window: usize,
    pub state_budget: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSettings {
    pub dir: String,
    pub formats: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub train: TrainSettings,
    pub eval: EvalSettings,
    pub output: OutputSettings,
}

#[derive(Default)]
struct RawSection {
    entries: Vec<(usize, String, String)>,
}

impl RawSection {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        let pos = self.entries.iter().position(|(_, k, _)| k == key)?;
        let (line, _, value) = self.entries.remove(pos);
        Some((line, value))
    }
}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut sections: Vec<(String, RawSection)> = Vec::new();
    let mut current: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| err(line_no, "unterminated section header"))?;
            if !matches!(name, "env" | "train" | "eval" | "output") {
                return Err(err(line_no, format!("unknown section [{name}]")));
            }
            if sections.iter().any(|(n, _)| n == name) {
                return Err(err(line_no, format!("duplicate section [{name}]")));
            }
            sections.push((name.to_string(), RawSection::default()));
            current = Some(sections.len() - 1);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line_no, "expected `key = value`"))?;
        let idx = current.ok_or_else(|| err(line_no, "key outside any [section]"))?;
        let key = key.trim().to_string();
        if sections[idx].1.entries.iter().any(|(_, k, _)| *k == key) {
            return Err(err(line_no, format!("duplicate key `{key}`")));
        }
        sections[idx].1.entries.push((line_no, key, value.trim().to_string()));
    }

    let mut section = |name: &str| -> RawSection {
        sections
            .iter_mut()
            .find(|(n, _)| n == name)
            .map(|(_, s)| std::mem::take(s))
            .unwrap_or_default()
    };

    let env = parse_env(section("env"))?;
    let train = parse_train(section("train"))?;
    let eval = parse_eval(section("eval"))?;
    let output = parse_output(section("output"))?;
    Ok(ExperimentConfig { env, train, eval, output })
}

fn reject_leftovers(sec: &RawSection, section: &str) -> Result<(), ConfigError> {
    if let Some((line, key, _)) = sec.entries.first() {
        return Err(err(*line, format!("unknown key `{key}` in [{section}]")));
    }
    Ok(())
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| err(line, format!("invalid value for `{key}`: `{v}`")))
}

fn parse_env(mut sec: RawSection) -> Result<EnvConfig, ConfigError> {
    let (line, kind) = sec.take("env").ok_or_else(|| err(0, "missing `env` key in [env]"))?;
    let cfg = match kind.as_str() {
        "hypergrid" => {
            let horizon = take_num(&mut sec, "horizon", 16usize)?;
            let dim = take_num(&mut sec, "dim", 2usize)?;
            let r0 = take_num(&mut sec, "r0", 0.001f64)?;
            let symmetry = match sec.take("symmetry") {
                Some((l, v)) => GridSymmetry::parse(&v)
                    .ok_or_else(|| err(l, format!("invalid symmetry `{v}` (expected baseline|group_average|canonical)")))?,
                None => GridSymmetry::Baseline,
            };
            if horizon < 2 {
                return Err(err(line, "horizon must be at least 2"));
            }
            if dim < 1 {
                return Err(err(line, "dim must be at least 1"));
            }
            if r0 <= 0.0 {
                return Err(err(line, "r0 must be positive"));
            }
            EnvConfig::Hypergrid { horizon, dim, r0, symmetry }
        }
        "graph" => {
            let n_max = take_num(&mut sec, "n_max", 7usize)?;
            let n_colors = take_num(&mut sec, "n_colors", 2usize)?;
            let reward = match sec.take("reward") {
                Some((l, v)) => RewardKind::parse(&v)
                    .ok_or_else(|| err(l, format!("invalid reward `{v}` (expected counting|neighbors|cliques)")))?,
                None => RewardKind::Counting,
            };
            let r0 = take_num(&mut sec, "r0", 0.1f64)?;
            let symmetry = match sec.take("symmetry") {
                Some((l, v)) => match v.as_str() {
                    "vanilla" => GraphSymmetry::Vanilla,
                    "oracle" => GraphSymmetry::Oracle,
                    "pe" => GraphSymmetry::Pe(parse_pe(&mut sec)?),
                    _ => return Err(err(l, format!("invalid symmetry `{v}` (expected vanilla|oracle|pe)"))),
                },
                None => GraphSymmetry::Oracle,
            };
            if n_max < 1 || n_max > crate::graphsym::N_MAX {
                return Err(err(line, format!("n_max must be in 1..={}", crate::graphsym::N_MAX)));
            }
            if n_colors != 2 {
                return Err(err(line, "the reward families are defined for exactly 2 colors"));
            }
            if r0 <= 0.0 {
                return Err(err(line, "r0 must be positive"));
            }
            EnvConfig::Graph(GraphEnvConfig { n_max, n_colors, reward, r0, symmetry })
        }
        other => return Err(err(line, format!("unknown env `{other}`"))),
    };
    reject_leftovers(&sec, "env")?;
    Ok(cfg)
}

fn parse_pe(sec: &mut RawSection) -> Result<PeConfig, ConfigError> {
    let mut pe = match sec.take("pe") {
        Some((l, v)) => PeConfig::from_components(&v)
            .ok_or_else(|| err(l, format!("invalid pe components `{v}`")))?,
        None => PeConfig::default(),
    };
    if let Some((l, v)) = sec.take("pe_level") {
        pe.level = match v.as_str() {
            "graph" => PeLevel::Graph,
            "node_edge" => PeLevel::NodeEdge,
            _ => return Err(err(l, format!("invalid pe_level `{v}`"))),
        };
    }
    if let Some((l, v)) = sec.take("rw_powers") {
        pe.rw_powers = parse_num(l, "rw_powers", &v)?;
        if pe.rw_powers == 0 {
            return Err(err(l, "rw_powers must be at least 1"));
        }
    }
    if let Some((l, v)) = sec.take("wl_rounds") {
        pe.wl_rounds = if v == "stab" {
            None
        } else {
            Some(parse_num(l, "wl_rounds", &v)?)
        };
    }
    if let Some((l, v)) = sec.take("rw_orientation") {
        pe.orientation = RwOrientation::parse(&v)
            .ok_or_else(|| err(l, format!("invalid rw_orientation `{v}` (expected diag|mass|walk)")))?;
    }
    Ok(pe)
}

fn take_num<T: std::str::FromStr + Copy>(
    sec: &mut RawSection,
    key: &str,
    default: T,
) -> Result<T, ConfigError> {
    match sec.take(key) {
        Some((l, v)) => parse_num(l, key, &v),
        None => Ok(default),
    }
}

fn parse_train(mut sec: RawSection) -> Result<TrainSettings, ConfigError> {
    let loss = match sec.take("loss") {
        Some((l, v)) => LossKind::parse(&v)
            .ok_or_else(|| err(l, format!("invalid loss `{v}` (expected FM|DB|TB)")))?,
        None => LossKind::Tb,
    };
    let epsilon = take_num(&mut sec, "epsilon", 0.05f64)?;
    let batch_size = take_num(&mut sec, "batch_size", 16usize)?;
    let steps = take_num(&mut sec, "steps", 1000usize)?;
    let learning_rate = take_num(&mut sec, "learning_rate", 0.001f64)?;
    let seed = take_num(&mut sec, "seed", 0u64)?;
    let backend = match sec.take("backend") {
        Some((l, v)) => match v.as_str() {
            "tabular" => Backend::Tabular,
            "dense" => Backend::Dense,
            _ => return Err(err(l, format!("invalid backend `{v}`"))),
        },
        None => Backend::Tabular,
    };
    let hidden = match sec.take("hidden") {
        Some((l, v)) => v
            .split(',')
            .map(|p| parse_num(l, "hidden", p.trim()))
            .collect::<Result<Vec<usize>, _>>()?,
        None => vec![64, 64],
    };
    let learn_backward = match sec.take("backward") {
        Some((l, v)) => match v.as_str() {
            "uniform" => false,
            "learned" => true,
            _ => return Err(err(l, format!("invalid backward `{v}` (expected uniform|learned)"))),
        },
        None => false,
    };
    let log_z_lr_mult = take_num(&mut sec, "log_z_lr_mult", 10.0f64)?;
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(err(0, "epsilon must be in [0, 1]"));
    }
    if batch_size == 0 {
        return Err(err(0, "batch_size must be positive"));
    }
    if learning_rate <= 0.0 {
        return Err(err(0, "learning_rate must be positive"));
    }
    reject_leftovers(&sec, "train")?;
    Ok(TrainSettings {
        loss,
        epsilon,
        batch_size,
        steps,
        learning_rate,
        seed,
        backend,
        hidden,
        learn_backward,
        log_z_lr_mult,
    })
}

fn parse_eval(mut sec: RawSection) -> Result<EvalSettings, ConfigError> {
    let every = take_num(&mut sec, "every", 100usize)?;
    let window = take_num(&mut sec, "window", 200_000usize)?;
    let state_budget = take_num(&mut sec, "state_budget", 10_000_000usize)?;
    if every == 0 || window == 0 {
        return Err(err(0, "eval cadence and window must be positive"));
    }
    reject_leftovers(&sec, "eval")?;
    Ok(EvalSettings { every, window, state_budget })
}

fn parse_output(mut sec: RawSection) -> Result<OutputSettings, ConfigError> {
    let dir = sec.take("dir").map(|(_, v)| v).unwrap_or_else(|| "out".to_string());
    let formats = match sec.take("formats") {
        Some((l, v)) => {
            let fs: Vec<String> = v.split(',').map(|p| p.trim().to_string()).collect();
            for f in &fs {
                if f != "csv" {
                    return Err(err(l, format!("unsupported output format `{f}`")));
                }
            }
            fs
        }
        None => vec!["csv".to_string()],
    };
    reject_leftovers(&sec, "output")?;
    Ok(OutputSettings { dir, formats })
}

impl fmt::Display for ExperimentConfig {
    /// The resolved form: every key explicit, fixed order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[env]")?;
        match &self.env {
            EnvConfig::Hypergrid { horizon, dim, r0, symmetry } => {
                writeln!(f, "env = hypergrid")?;
                writeln!(f, "horizon = {horizon}")?;
                writeln!(f, "dim = {dim}")?;
                writeln!(f, "r0 = {r0}")?;
                writeln!(f, "symmetry = {}", symmetry.name())?;
            }
            EnvConfig::Graph(g) => {
                writeln!(f, "env = graph")?;
                writeln!(f, "n_max = {}", g.n_max)?;
                writeln!(f, "n_colors = {}", g.n_colors)?;
                writeln!(f, "reward = {}", g.reward.name())?;
                writeln!(f, "r0 = {}", g.r0)?;
                writeln!(f, "symmetry = {}", g.symmetry.name())?;
                if let GraphSymmetry::Pe(pe) = &g.symmetry {
                    writeln!(f, "pe = {}", pe.components())?;
                    writeln!(
                        f,
                        "pe_level = {}",
                        match pe.level {
                            PeLevel::Graph => "graph",
                            PeLevel::NodeEdge => "node_edge",
                        }
                    )?;
                    writeln!(f, "rw_powers = {}", pe.rw_powers)?;
                    match pe.wl_rounds {
                        None => writeln!(f, "wl_rounds = stab")?,
                        Some(r) => writeln!(f, "wl_rounds = {r}")?,
                    }
                    writeln!(f, "rw_orientation = {}", pe.orientation.name())?;
                }
            }
        }
        writeln!(f)?;
        writeln!(f, "[train]")?;
        writeln!(f, "loss = {}", self.train.loss.name())?;
        writeln!(f, "epsilon = {}", self.train.epsilon)?;
        writeln!(f, "batch_size = {}", self.train.batch_size)?;
        writeln!(f, "steps = {}", self.train.steps)?;
        writeln!(f, "learning_rate = {}", self.train.learning_rate)?;
        writeln!(f, "seed = {}", self.train.seed)?;
        writeln!(f, "backend = {}", self.train.backend.name())?;
        writeln!(
            f,
            "hidden = {}",
            self.train.hidden.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(",")
        )?;
        writeln!(f, "backward = {}", if self.train.learn_backward { "learned" } else { "uniform" })?;
        writeln!(f, "log_z_lr_mult = {}", self.train.log_z_lr_mult)?;
        writeln!(f)?;
        writeln!(f, "[eval]")?;
        writeln!(f, "every = {}", self.eval.every)?;
        writeln!(f, "window = {}", self.eval.window)?;
        writeln!(f, "state_budget = {}", self.eval.state_budget)?;
        writeln!(f)?;
        writeln!(f, "[output]")?;
        writeln!(f, "dir = {}", self.output.dir)?;
        writeln!(f, "formats = {}", self.output.formats.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HYPERGRID: &str = "\
[env]
env = hypergrid
horizon = 8
dim = 2
r0 = 0.001
symmetry = canonical

[train]
loss = TB
steps = 50
seed = 7

[eval]
every = 10

[output]
dir = out/test
";

    #[test]
    fn parses_with_defaults() {
        let cfg = parse(HYPERGRID).unwrap();
        match cfg.env {
            EnvConfig::Hypergrid { horizon, dim, symmetry, .. } => {
                assert_eq!(horizon, 8);
                assert_eq!(dim, 2);
                assert_eq!(symmetry, GridSymmetry::Canonical);
            }
            _ => panic!("wrong env"),
        }
        assert_eq!(cfg.train.batch_size, 16);
        assert_eq!(cfg.eval.window, 200_000);
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let text = HYPERGRID.replace("r0 = 0.001", "r0 = 0.001\nbogus = 1");
        let e = parse(&text).unwrap_err();
        assert_eq!(e.line, 6);
        assert!(e.msg.contains("bogus"));
    }

    #[test]
    fn resolved_round_trip() {
        let cfg = parse(HYPERGRID).unwrap();
        let resolved = cfg.to_string();
        let again = parse(&resolved).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(resolved, again.to_string());
    }

    #[test]
    fn graph_pe_round_trip() {
        let text = "\
[env]
env = graph
n_max = 5
reward = cliques
symmetry = pe
pe = wl+rw+edge
pe_level = graph
wl_rounds = 1

[train]
loss = DB

[eval]

[output]
dir = o
";
        let cfg = parse(text).unwrap();
        let again = parse(&cfg.to_string()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let text = format!("# top comment\n{HYPERGRID}\n# trailing");
        assert!(parse(&text).is_ok());
    }
}
