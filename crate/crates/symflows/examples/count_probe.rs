use symflows::graphenv::space::{benchmark_actions, enumerate_graphs};
use symflows::graphsym::pe::{PeConfig, PeLevel, WlSummary};
use symflows::graphsym::rwpe::RwOrientation;
use symflows::graphsym::pe_benchmark;

fn main() {
    let n_max: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let states = enumerate_graphs(n_max, 2).unwrap();
    println!("n_max={n_max}: {} states", states.len());
    let names = ["wl", "wl+edge", "wl+rw", "wl+rw+edge", "rw", "rw+edge"];
    let mut cfgs: Vec<(String, PeConfig)> = Vec::new();
    for (rounds, rl) in [(None, "stab"), (Some(1), "r1")] {
        for n in names {
            let mut c = PeConfig::from_components(n).unwrap();
            c.level = PeLevel::Graph;
            c.orientation = RwOrientation::ColorMass;
            c.wl_summary = WlSummary::IdMultiset;
            c.wl_rounds = rounds;
            cfgs.push((format!("{n}/{rl}"), c));
        }
    }
    let rows = pe_benchmark(&states, &cfgs, benchmark_actions(n_max, 2), 1).unwrap();
    for r in rows {
        println!("{:18} errors={:8} rate={:.6} elapsed={}ms", r.config, r.errors, r.error_rate(), r.elapsed_ms);
    }
}
