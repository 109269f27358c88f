//! Boosts weak ESNs on NARMA-10 and prints the error after every stage.
//!
//! cargo run --release --example l2boost_narma -- [seed]

use weakboost::boosting::{l2boost_fit, staged_predictions, BoostMode};
use weakboost::datasets::Benchmark;
use weakboost::harness::{prepare_data, ExperimentConfig};
use weakboost::metrics::evaluate;

fn main() -> weakboost::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut cfg = ExperimentConfig::for_benchmark(Benchmark::Narma10);
    cfg.n_reservoir = 100;
    cfg.seed = seed;
    let (train, test, _) = prepare_data(&cfg)?;

    for mode in [BoostMode::Fresh, BoostMode::Shared] {
        let model = l2boost_fit(&train, 6, &cfg.esn_params(), cfg.gamma, mode)?;
        let on_train = staged_predictions(&model, &train.inputs, None)?;
        let on_test = staged_predictions(&model, &test.inputs, None)?;
        println!("{mode} reservoirs");
        for (m, (p, q)) in on_train.iter().zip(&on_test).enumerate() {
            let tr = evaluate(p, &train.targets, train.washout)?;
            let te = evaluate(q, &test.targets, test.washout)?;
            println!("  M={m}  train NMSE {:.4}  test NMSE {:.4}", tr.nmse, te.nmse);
        }
    }
    Ok(())
}
