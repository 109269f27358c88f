//! Averages K independently seeded weak ESNs and compares with the members.

use weakboost::boosting::{baseline_fit, baseline_predict, member_predictions};
use weakboost::datasets::Benchmark;
use weakboost::harness::{prepare_data, ExperimentConfig};
use weakboost::metrics::evaluate;

fn main() -> weakboost::Result<()> {
    let mut cfg = ExperimentConfig::for_benchmark(Benchmark::Narma10);
    cfg.n_reservoir = 50;
    let (train, test, _) = prepare_data(&cfg)?;
    let model = baseline_fit(&train, 30, &cfg.esn_params(), cfg.gamma)?;

    let members: Vec<f64> = member_predictions(&model, &test.inputs)?
        .iter()
        .map(|p| evaluate(p, &test.targets, test.washout).map(|e| e.nmse))
        .collect::<weakboost::Result<_>>()?;
    let best = members.iter().cloned().fold(f64::INFINITY, f64::min);
    let worst = members.iter().cloned().fold(0.0, f64::max);
    let avg = evaluate(&baseline_predict(&model, &test.inputs)?, &test.targets, test.washout)?;
    println!("members: best {best:.4} worst {worst:.4}");
    println!("average of {}: {:.4}", model.len(), avg.nmse);
    Ok(())
}
