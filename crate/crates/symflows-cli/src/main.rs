//! Experiment runner: training runs, the PE benchmark, and state-space
//! enumeration. Exit codes: 0 success, 1 runtime error, 2 config error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use symflows::config::{self, EnvConfig};
use symflows::csvout;
use symflows::eval::enumerate_states;
use symflows::graphenv::space::{all_graph_counts, benchmark_actions, count_by_size, enumerate_graphs};
use symflows::graphenv::GraphEnv;
use symflows::graphsym::pe::{PeConfig, PeLevel};
use symflows::graphsym::pe_benchmark;
use symflows::graphsym::rwpe::RwOrientation;
use symflows::hypergrid::HypergridEnv;
use symflows::runner::run_experiment;

#[derive(Parser)]
#[command(name = "symflows", version, about = "Symmetry-aware GFlowNet experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a training experiment from a config file.
    Run { config: PathBuf },
    /// Benchmark PE action partitioning against the exact oracle over the
    /// whole graph state space.
    PeBench {
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        /// Comma-separated PE component lists, e.g. "wl,rw+edge".
        #[arg(long, default_value = "wl,wl+edge,rw,rw+edge,wl+rw,wl+rw+edge")]
        configs: String,
        /// 1-WL rounds for the WL component: an integer or "stab".
        #[arg(long, default_value = "1")]
        wl_rounds: String,
        /// Colored random-walk reading: diag | mass | walk.
        #[arg(long, default_value = "mass")]
        orientation: String,
        #[arg(long, default_value_t = 8)]
        rw_powers: usize,
        /// Write the report CSV here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the reachable state space of an env config.
    Enumerate { config: PathBuf },
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Run { config } => cmd_run(&config),
        Cmd::PeBench { n_max, configs, wl_rounds, orientation, rw_powers, out } => {
            cmd_pe_bench(n_max, &configs, &wl_rounds, &orientation, rw_powers, out.as_deref())
        }
        Cmd::Enumerate { config } => cmd_enumerate(&config),
    }
}

const CONFIG_ERROR: u8 = 2;
const RUNTIME_ERROR: u8 = 1;

fn cmd_run(path: &PathBuf) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read config {}: {e}", path.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let cfg = match config::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    match run_experiment(&cfg) {
        Ok(summary) => {
            println!(
                "run complete: {} steps, {} states visited, final loss {}",
                cfg.train.steps, summary.states_visited, summary.final_loss
            );
            if let Some(point) = summary.last_eval() {
                if let Some(l1) = point.l1 {
                    println!("final l1 = {l1}");
                }
                if let Some(jsd) = point.jsd {
                    println!("final jsd = {jsd}");
                }
                if let Some(r) = point.avg_reward {
                    println!("final avg_reward = {r}");
                }
            }
            println!("outputs in {}", summary.out_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RUNTIME_ERROR)
        }
    }
}

fn threads_from_env() -> usize {
    std::env::var("SYMFLOWS_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1)
}

fn cmd_pe_bench(
    n_max: usize,
    configs: &str,
    wl_rounds: &str,
    orientation: &str,
    rw_powers: usize,
    out: Option<&std::path::Path>,
) -> ExitCode {
    if n_max < 1 || n_max > 7 {
        eprintln!("error: --n-max must be in 1..=7");
        return ExitCode::from(CONFIG_ERROR);
    }
    let rounds = if wl_rounds == "stab" {
        None
    } else {
        match wl_rounds.parse::<usize>() {
            Ok(r) => Some(r),
            Err(_) => {
                eprintln!("error: --wl-rounds must be an integer or \"stab\"");
                return ExitCode::from(CONFIG_ERROR);
            }
        }
    };
    let Some(orientation) = RwOrientation::parse(orientation) else {
        eprintln!("error: --orientation must be diag, mass, or walk");
        return ExitCode::from(CONFIG_ERROR);
    };
    let mut cfgs = Vec::new();
    for name in configs.split(',') {
        let name = name.trim();
        let Some(pe) = PeConfig::from_components(name) else {
            eprintln!("error: bad PE config `{name}`");
            return ExitCode::from(CONFIG_ERROR);
        };
        cfgs.push((
            name.to_string(),
            PeConfig {
                level: PeLevel::Graph,
                wl_rounds: rounds,
                orientation,
                rw_powers,
                ..pe
            },
        ));
    }
    // the benchmark universe is actual graphs: the empty initial state is
    // excluded (its first-node actions are invisible to the walk features)
    let states: Vec<_> = match enumerate_graphs(n_max, 2) {
        Ok(s) => s.into_iter().filter(|g| g.n() > 0).collect(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(RUNTIME_ERROR);
        }
    };
    let rows = match pe_benchmark(&states, &cfgs, benchmark_actions(n_max, 2), threads_from_env()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(RUNTIME_ERROR);
        }
    };
    let report = csvout::bench_rows(&rows);
    print!("{report}");
    if let Some(path) = out {
        if let Err(e) = fs::write(path, &report) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(RUNTIME_ERROR);
        }
    }
    ExitCode::SUCCESS
}

fn cmd_enumerate(path: &PathBuf) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read config {}: {e}", path.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let cfg = match config::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    if let Err(e) = fs::create_dir_all(&cfg.output.dir) {
        eprintln!("error: cannot create output dir: {e}");
        return ExitCode::from(RUNTIME_ERROR);
    }
    let index_path = PathBuf::from(&cfg.output.dir).join("state_index.txt");
    match &cfg.env {
        EnvConfig::Hypergrid { horizon, dim, r0, .. } => {
            let env = HypergridEnv::new(*horizon, *dim, *r0);
            let index = match enumerate_states(&env, cfg.eval.state_budget) {
                Ok(i) => i,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(RUNTIME_ERROR);
                }
            };
            let desc = format!("hypergrid horizon={horizon} dim={dim}");
            if let Err(e) = write_index(&index, &index_path, &desc) {
                eprintln!("error: {e}");
                return ExitCode::from(RUNTIME_ERROR);
            }
            println!("states: {}", index.len());
        }
        EnvConfig::Graph(gcfg) => {
            let env = GraphEnv::new(gcfg.clone());
            let index = match enumerate_states(&env, cfg.eval.state_budget) {
                Ok(i) => i,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(RUNTIME_ERROR);
                }
            };
            let desc = format!("graph n_max={} n_colors={}", gcfg.n_max, gcfg.n_colors);
            if let Err(e) = write_index(&index, &index_path, &desc) {
                eprintln!("error: {e}");
                return ExitCode::from(RUNTIME_ERROR);
            }
            println!("states: {}", index.len());
            // convention reconciliation: the closure count includes the
            // empty initial state; the connected-only toggle is computed by
            // multiset composition of connected components
            let connected = count_by_size(
                &index.states,
                gcfg.n_max,
            );
            let connected_total: u64 = connected[1..].iter().sum();
            let all = all_graph_counts(&connected, gcfg.n_max);
            let all_total: u64 = all[1..].iter().sum();
            println!("reconciliation:");
            println!("  connected, with empty initial state:    {}", connected_total + 1);
            println!("  connected, without empty state:         {connected_total}");
            println!("  all graphs, with empty state:           {}", all_total + 1);
            println!("  all graphs, without empty state:        {all_total}");
        }
    }
    println!("index written to {}", index_path.display());
    ExitCode::SUCCESS
}

fn write_index<S>(
    index: &symflows::eval::StateIndex<S>,
    path: &std::path::Path,
    desc: &str,
) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    index.write_keys(&mut w, desc)
}
