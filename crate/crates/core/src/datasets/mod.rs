//! Benchmark series and their supervised, washout-aware packaging.
//!
//! Every benchmark is a one-step-ahead prediction task:
//!
//! | benchmark        | input `x(t)`                  | target        |
//! |------------------|-------------------------------|---------------|
//! | NARMA-10 / -30   | `[s(t)]` (driver)             | `b(t+1)`      |
//! | Santa Fe laser   | `[y(t)]`                      | `y(t+1)`      |
//! | Hénon map        | `[y(t), y(t-1), z(t+1)]`      | `y(t+1)`      |
//! | Freedman         | `[y(t)]`                      | `y(t+1)`      |
//!
//! The Hénon input includes the noise term added at the predicted step, so
//! the model sees the target's own noise.

mod generators;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use generators::{
    bundled_laser, gen_freedman, gen_henon, gen_narma, henon_orbit, load_laser, narma_recurrence, NarmaAlphas,
    DIVERGENCE_BOUND, FREEDMAN_Y0, HENON_NOISE_STD, MAX_GENERATOR_ATTEMPTS,
};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Rng};

/// A scalar series plus the exogenous sequences some generators produce.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub values: Vec<f64>,
    /// NARMA driver `s(t)`.
    pub driver: Option<Vec<f64>>,
    /// Hénon noise `z(t)`.
    pub noise: Option<Vec<f64>>,
}

impl RawSeries {
    pub fn from_values(values: Vec<f64>) -> Self {
        RawSeries {
            values,
            driver: None,
            noise: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The first `len` samples of every column.
    pub fn prefix(&self, len: usize) -> RawSeries {
        let len = len.min(self.len());
        RawSeries {
            values: self.values[..len].to_vec(),
            driver: self.driver.as_ref().map(|d| d[..len].to_vec()),
            noise: self.noise.as_ref().map(|z| z[..len].to_vec()),
        }
    }

    /// Columns in the fixed order values, driver, noise (absent ones skipped).
    fn columns(&self) -> Vec<&[f64]> {
        let mut cols = vec![self.values.as_slice()];
        cols.extend(self.driver.as_deref());
        cols.extend(self.noise.as_deref());
        cols
    }

    fn map_columns(&self, mut f: impl FnMut(usize, &[f64]) -> Vec<f64>) -> RawSeries {
        let mut idx = 0;
        let mut next = |col: &[f64]| {
            let out = f(idx, col);
            idx += 1;
            out
        };
        let values = next(&self.values);
        let driver = self.driver.as_deref().map(&mut next);
        let noise = self.noise.as_deref().map(&mut next);
        RawSeries { values, driver, noise }
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        for (name, col) in [("driver", &self.driver), ("noise", &self.noise)] {
            if let Some(c) = col {
                if c.len() != n {
                    return Err(Error::data(format!(
                        "{name} has {} samples but values have {n}",
                        c.len()
                    )));
                }
            }
        }
        if self.columns().iter().any(|c| c.iter().any(|v| !v.is_finite())) {
            return Err(Error::data("series contains non-finite values"));
        }
        Ok(())
    }
}

/// Per-column `(min, max)` bounds for min-max scaling, in the column order
/// values, driver, noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub bounds: Vec<(f64, f64)>,
}

impl NormStats {
    /// Bounds of every column of `series`; a constant column is an error.
    pub fn fit(series: &RawSeries) -> Result<NormStats> {
        series.validate()?;
        if series.is_empty() {
            return Err(Error::data("cannot compute normalization bounds of an empty series"));
        }
        let bounds = series
            .columns()
            .iter()
            .enumerate()
            .map(|(i, col)| {
                let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if lo == hi {
                    Err(Error::data(format!(
                        "column {i} is constant ({lo}); min-max scaling is undefined"
                    )))
                } else {
                    Ok((lo, hi))
                }
            })
            .collect::<Result<_>>()?;
        Ok(NormStats { bounds })
    }

    fn check_columns(&self, series: &RawSeries) -> Result<()> {
        let n = series.columns().len();
        if self.bounds.len() != n {
            return Err(Error::param(format!(
                "normalization bounds cover {} columns, series has {n}",
                self.bounds.len()
            )));
        }
        if let Some((i, _)) = self
            .bounds
            .iter()
            .enumerate()
            .find(|(_, (lo, hi))| lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::param(format!("column {i} bounds are not increasing")));
        }
        Ok(())
    }

    /// Maps scaled values back to the original units.
    pub fn denormalize(&self, series: &RawSeries) -> Result<RawSeries> {
        self.check_columns(series)?;
        Ok(series.map_columns(|i, col| {
            let (lo, hi) = self.bounds[i];
            col.iter().map(|v| v * (hi - lo) + lo).collect()
        }))
    }
}

/// Scales each column to `[0, 1]` by `(v - min) / (max - min)`.
///
/// With `stats` supplied (the test-segment case) those bounds are reused and
/// outputs may leave `[0, 1]`.
pub fn normalize_minmax(series: &RawSeries, stats: Option<&NormStats>) -> Result<(RawSeries, NormStats)> {
    series.validate()?;
    let stats = match stats {
        Some(s) => {
            s.check_columns(series)?;
            s.clone()
        }
        None => NormStats::fit(series)?,
    };
    let scaled = series.map_columns(|i, col| {
        let (lo, hi) = stats.bounds[i];
        col.iter().map(|v| (v - lo) / (hi - lo)).collect()
    });
    Ok((scaled, stats))
}

/// The benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Benchmark {
    Narma10,
    Narma30,
    Laser,
    Henon,
    Freedman,
}

/// Washout, ridge penalty, and segment sizes of one benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkDefaults {
    pub washout: usize,
    pub gamma: f64,
    pub n_train: usize,
    pub n_test: usize,
}

impl Benchmark {
    pub const ALL: [Benchmark; 5] = [
        Benchmark::Narma10,
        Benchmark::Narma30,
        Benchmark::Laser,
        Benchmark::Henon,
        Benchmark::Freedman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Narma10 => "narma10",
            Benchmark::Narma30 => "narma30",
            Benchmark::Laser => "laser",
            Benchmark::Henon => "henon",
            Benchmark::Freedman => "freedman",
        }
    }

    pub fn defaults(self) -> BenchmarkDefaults {
        let (washout, gamma, n_train, n_test) = match self {
            Benchmark::Narma10 => (200, 1e-5, 1400, 2400),
            Benchmark::Narma30 => (200, 1e-5, 1600, 2600),
            Benchmark::Laser => (10, 1e-3, 499, 500),
            Benchmark::Henon => (100, 1e-3, 3995, 795),
            Benchmark::Freedman => (3, 1e-3, 30, 19),
        };
        BenchmarkDefaults {
            washout,
            gamma,
            n_train,
            n_test,
        }
    }

    /// Input width `N_x` of the supervised task.
    pub fn n_inputs(self) -> usize {
        match self {
            Benchmark::Henon => 3,
            _ => 1,
        }
    }

    /// Raw samples consumed beyond the number of supervised rows.
    pub fn lag(self) -> usize {
        match self {
            Benchmark::Henon => 2,
            _ => 1,
        }
    }

    /// Raw series length that yields exactly `rows` supervised rows.
    pub fn series_length(self, rows: usize) -> usize {
        rows + self.lag()
    }

    /// Generates (or, for the laser, returns the bundled recording of) a raw
    /// series of `length` samples.
    pub fn generate(self, length: usize, rng: Rng) -> Result<RawSeries> {
        match self {
            Benchmark::Narma10 => gen_narma(10, NarmaAlphas::ORDER_10, length, rng),
            Benchmark::Narma30 => gen_narma(30, NarmaAlphas::ORDER_30, length, rng),
            Benchmark::Henon => gen_henon(length, rng, HENON_NOISE_STD),
            Benchmark::Freedman => gen_freedman(length, FREEDMAN_Y0),
            Benchmark::Laser => {
                let s = bundled_laser();
                if length > s.len() {
                    return Err(Error::data(format!(
                        "laser recording has {} samples, {length} requested",
                        s.len()
                    )));
                }
                Ok(s.prefix(length))
            }
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_lowercase();
        match norm.as_str() {
            "narma10" => Ok(Benchmark::Narma10),
            "narma30" => Ok(Benchmark::Narma30),
            "laser" | "santafe" | "santafelaser" => Ok(Benchmark::Laser),
            "henon" | "hénon" => Ok(Benchmark::Henon),
            "freedman" => Ok(Benchmark::Freedman),
            _ => Err(Error::param(format!(
                "unknown benchmark {s:?}; expected one of narma10, narma30, laser, henon, freedman"
            ))),
        }
    }
}

/// Aligned input/target rows with the number of leading washout rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesDataset {
    pub inputs: Matrix,
    pub targets: Matrix,
    pub washout: usize,
    pub name: String,
}

impl SeriesDataset {
    pub fn new(inputs: Matrix, targets: Matrix, washout: usize, name: impl Into<String>) -> Result<Self> {
        if inputs.rows() != targets.rows() {
            return Err(Error::param(format!(
                "inputs have {} rows, targets {}",
                inputs.rows(),
                targets.rows()
            )));
        }
        if washout >= inputs.rows() {
            return Err(Error::data(format!(
                "washout {washout} leaves no rows out of {}",
                inputs.rows()
            )));
        }
        Ok(SeriesDataset {
            inputs,
            targets,
            washout,
            name: name.into(),
        })
    }

    pub fn rows(&self) -> usize {
        self.inputs.rows()
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.cols()
    }

    pub fn n_outputs(&self) -> usize {
        self.targets.cols()
    }

    /// Targets with the washout rows removed.
    pub fn fit_targets(&self) -> Matrix {
        self.targets.slice_rows(self.washout..self.rows())
    }

    /// Writes `t,x_1..x_Nx,y_1..y_Ny` with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.n_inputs()).map(|i| format!("x_{i}")));
        header.extend((1..=self.n_outputs()).map(|i| format!("y_{i}")));
        let to_err = |e: csv::Error| Error::data(format!("csv write failed: {e}"));
        w.write_record(&header).map_err(to_err)?;
        for t in 0..self.rows() {
            let mut rec = vec![t.to_string()];
            rec.extend(self.inputs.row(t).iter().map(|v| v.to_string()));
            rec.extend(self.targets.row(t).iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::data(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

/// Wires a raw series into one-step-ahead input/target rows for `task`.
pub fn make_supervised(series: &RawSeries, task: Benchmark, washout: usize) -> Result<SeriesDataset> {
    series.validate()?;
    let n = series.len();
    let lag = task.lag();
    if n <= lag + washout {
        return Err(Error::data(format!(
            "{task} series of length {n} is too short for lag {lag} plus washout {washout}"
        )));
    }
    let rows = n - lag;
    let y = &series.values;
    let (inputs, targets): (Vec<f64>, Vec<f64>) = match task {
        Benchmark::Narma10 | Benchmark::Narma30 => {
            let s = series
                .driver
                .as_ref()
                .ok_or_else(|| Error::data("NARMA series has no driver"))?;
            (s[..rows].to_vec(), y[1..].to_vec())
        }
        Benchmark::Laser | Benchmark::Freedman => (y[..rows].to_vec(), y[1..].to_vec()),
        Benchmark::Henon => {
            let z = series
                .noise
                .as_ref()
                .ok_or_else(|| Error::data("Hénon series has no noise sequence"))?;
            let inputs = (1..n - 1).flat_map(|t| [y[t], y[t - 1], z[t + 1]]).collect();
            (inputs, y[2..].to_vec())
        }
    };
    SeriesDataset::new(
        Matrix::from_raw(rows, task.n_inputs(), inputs),
        Matrix::from_raw(rows, 1, targets),
        washout,
        task.name(),
    )
}

/// Contiguous train/test split; both parts keep the dataset's washout.
pub fn split(dataset: &SeriesDataset, n_train: usize, n_test: usize) -> Result<(SeriesDataset, SeriesDataset)> {
    if n_train + n_test > dataset.rows() {
        return Err(Error::data(format!(
            "split needs {} rows, dataset has {}",
            n_train + n_test,
            dataset.rows()
        )));
    }
    let part = |range: std::ops::Range<usize>, suffix: &str| {
        SeriesDataset::new(
            dataset.inputs.slice_rows(range.clone()),
            dataset.targets.slice_rows(range),
            dataset.washout,
            format!("{}-{suffix}", dataset.name),
        )
    };
    Ok((part(0..n_train, "train")?, part(n_train..n_train + n_test, "test")?))
}
