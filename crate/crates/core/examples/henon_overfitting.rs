//! Training NMSE on the Hénon map for small reservoirs and M in 3..=5,
//! next to the 30-member average.

use weakboost::datasets::Benchmark;
use weakboost::harness::{run_experiment, ExperimentConfig, Method};

fn main() -> weakboost::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    println!("{:>3} {:>10} {:>10} {:>10} {:>10}", "Ns", "M=3", "M=4", "M=5", "K=30");
    for ns in 6..=12 {
        let mut cfg = ExperimentConfig::for_benchmark(Benchmark::Henon);
        cfg.n_reservoir = ns;
        cfg.seed = seed;
        let mut row = format!("{ns:>3}");
        for m in 3..=5 {
            cfg.method = Method::Boost;
            cfg.m_stages = m;
            row += &format!(" {:>10.5}", run_experiment(&cfg)?.train_nmse);
        }
        cfg.method = Method::Baseline;
        row += &format!(" {:>10.5}", run_experiment(&cfg)?.train_nmse);
        println!("{row}");
    }
    Ok(())
}
