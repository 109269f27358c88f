//! Trains one weak ESN on the Santa Fe laser series.

use weakboost::boosting::train_single_esn;
use weakboost::datasets::Benchmark;
use weakboost::esn::esn_predict;
use weakboost::harness::{prepare_data, ExperimentConfig};
use weakboost::metrics::evaluate;

fn main() -> weakboost::Result<()> {
    let mut cfg = ExperimentConfig::for_benchmark(Benchmark::Laser);
    cfg.n_reservoir = 60;
    let (train, test, _) = prepare_data(&cfg)?;
    for seed in 0..5 {
        let params = cfg.esn_params().with_seed(seed);
        let (res, readout) = train_single_esn(&train, &params, cfg.gamma)?;
        let tr = evaluate(
            &esn_predict(&res, &readout, &train.inputs, None)?,
            &train.targets,
            train.washout,
        )?;
        let te = evaluate(
            &esn_predict(&res, &readout, &test.inputs, None)?,
            &test.targets,
            test.washout,
        )?;
        println!("seed {seed}: train NMSE {:.4}  test NMSE {:.4}", tr.nmse, te.nmse);
    }
    Ok(())
}
