//! Trains a boosted model, dumps it to JSON, reloads it and checks the
//! predictions survive the round trip.

use weakboost::boosting::{boost_predict, ModelDump};
use weakboost::datasets::Benchmark;
use weakboost::harness::{prepare_data, train_model, ExperimentConfig, Method, TrainedModel};

fn main() -> weakboost::Result<()> {
    let mut cfg = ExperimentConfig::for_benchmark(Benchmark::Freedman);
    cfg.method = Method::Boost;
    cfg.m_stages = 3;
    cfg.n_reservoir = 30;
    let (train, test, _) = prepare_data(&cfg)?;
    let model = train_model(&cfg, &train)?;

    let json = model.dump()?.to_json()?;
    println!("dump: {} bytes", json.len());
    let restored = ModelDump::from_json(&json)?.into_boost()?;
    let before = model.predict(&test.inputs)?;
    let after = boost_predict(&restored, &test.inputs, None)?;
    println!("max |difference| after reload: {:e}", before.max_abs_diff(&after));
    assert!(matches!(model, TrainedModel::Boost(_)));
    Ok(())
}
