//! Generates every benchmark at its default size and prints a few samples.
//!
//! cargo run --example generate_benchmarks

use weakboost::datasets::{make_supervised, normalize_minmax, Benchmark};
use weakboost::numerics::Rng;

fn main() -> weakboost::Result<()> {
    for b in Benchmark::ALL {
        let d = b.defaults();
        let raw = b.generate(b.series_length(d.n_train + d.n_test), Rng::new(7))?;
        let (scaled, _) = normalize_minmax(&raw, None)?;
        let ds = make_supervised(&scaled, b, d.washout)?;
        let head: Vec<String> = raw.values[..5].iter().map(|v| format!("{v:.5}")).collect();
        println!(
            "{:<9} samples={:<5} rows={:<5} inputs={} washout={:<4} first: {}",
            b.name(),
            raw.len(),
            ds.rows(),
            ds.n_inputs(),
            d.washout,
            head.join(" ")
        );
    }
    Ok(())
}
