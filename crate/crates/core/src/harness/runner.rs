use std::fmt;
use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::config::{parse_usize_list, ExperimentConfig, Method, Settings};
use crate::boosting::{
    baseline_fit, baseline_predict, boost_predict, l2boost_fit, BoostModel, EnsembleModel, ModelDump,
};
use crate::datasets::{
    gen_henon, load_laser, make_supervised, normalize_minmax, split, Benchmark, NormStats, SeriesDataset,
};
use crate::error::{Error, Result};
use crate::esn::{esn_predict, run_reservoir, Readout, Reservoir};
use crate::metrics::{evaluate, EvalResult};
use crate::numerics::{Matrix, Rng};

/// Offset from the experiment seed to the seed of the data generator (NARMA
/// driver, Hénon noise). Reservoirs use the experiment seed itself, boosting
/// stage `m` uses `seed + m` and ensemble member `j` uses `seed + j`.
pub const DATA_SEED_OFFSET: u64 = 0x5851_F42D_4C95_7F2D;

/// Column names of the results CSV, in order.
pub const RESULT_COLUMNS: [&str; 11] = [
    "run_id",
    "benchmark",
    "method",
    "n_reservoir",
    "M_or_K",
    "seed",
    "train_nmse",
    "test_nmse",
    "train_mse",
    "test_mse",
    "wall_ms",
];

/// A metric value, or `diverged` when the cell failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric(pub Option<f64>);

impl Metric {
    pub const DIVERGED: Metric = Metric(None);

    pub fn value(self) -> Option<f64> {
        self.0
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(v) => fmt::Display::fmt(&v, f),
            None => f.pad("diverged"),
        }
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Some(v) => s.serialize_f64(v),
            None => s.serialize_str("diverged"),
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_metric(text.trim())
            .ok_or_else(|| serde::de::Error::custom(format!("expected a finite number or \"diverged\", got {text:?}")))
    }
}

/// One row of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub run_id: String,
    pub benchmark: String,
    pub method: String,
    pub n_reservoir: usize,
    #[serde(rename = "M_or_K")]
    pub m_or_k: usize,
    pub seed: u64,
    pub train_nmse: Metric,
    pub test_nmse: Metric,
    pub train_mse: Metric,
    pub test_mse: Metric,
    pub wall_ms: f64,
}

impl ResultRecord {
    fn skeleton(cfg: &ExperimentConfig) -> Self {
        ResultRecord {
            run_id: run_id(cfg),
            benchmark: cfg.benchmark.name().to_string(),
            method: cfg.method.name().to_string(),
            n_reservoir: cfg.n_reservoir,
            m_or_k: cfg.m_or_k(),
            seed: cfg.seed,
            train_nmse: Metric::DIVERGED,
            test_nmse: Metric::DIVERGED,
            train_mse: Metric::DIVERGED,
            test_mse: Metric::DIVERGED,
            wall_ms: 0.0,
        }
    }

    /// Row for a cell that failed; every metric is `diverged`.
    pub fn diverged(cfg: &ExperimentConfig) -> Self {
        ResultRecord::skeleton(cfg)
    }

    pub fn is_diverged(&self) -> bool {
        [self.train_nmse, self.test_nmse, self.train_mse, self.test_mse]
            .iter()
            .any(|m| m.0.is_none())
    }
}

fn run_id(cfg: &ExperimentConfig) -> String {
    let tag = match cfg.method {
        Method::Single => String::new(),
        Method::Boost => format!("-M{}-{}", cfg.m_stages, cfg.boost_mode),
        Method::Baseline => format!("-K{}", cfg.ensemble_size),
    };
    format!(
        "{}-{}{}-ns{}-s{}",
        cfg.benchmark, cfg.method, tag, cfg.n_reservoir, cfg.seed
    )
}

/// Normalized train and test segments for `cfg`.
///
/// Min-max bounds are computed on the raw samples the training rows touch and
/// reused for the test rows.
pub fn prepare_data(cfg: &ExperimentConfig) -> Result<(SeriesDataset, SeriesDataset, NormStats)> {
    let b = cfg.benchmark;
    let rows = cfg.n_train + cfg.n_test;
    let length = b.series_length(rows);
    let data_rng = Rng::new(cfg.seed.wrapping_add(DATA_SEED_OFFSET));
    let raw = match (b, &cfg.laser_file) {
        (Benchmark::Laser, Some(path)) => {
            let s = load_laser(path)?;
            if s.len() < length {
                return Err(Error::data(format!(
                    "laser file {} has {} samples, {length} needed",
                    path.display(),
                    s.len()
                )));
            }
            s.prefix(length)
        }
        (Benchmark::Henon, _) => gen_henon(length, data_rng, cfg.noise_std)?,
        _ => b.generate(length, data_rng)?,
    };
    let (_, stats) = normalize_minmax(&raw.prefix(b.series_length(cfg.n_train)), None)?;
    let (scaled, _) = normalize_minmax(&raw, Some(&stats))?;
    let dataset = make_supervised(&scaled, b, cfg.washout)?;
    let (train, test) = split(&dataset, cfg.n_train, cfg.n_test)?;
    Ok((train, test, stats))
}

/// A trained predictor of any method.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Single(Reservoir, Readout),
    Boost(BoostModel),
    Baseline(EnsembleModel),
}

impl TrainedModel {
    /// Predictions over `inputs`, every reservoir starting from the zero state.
    pub fn predict(&self, inputs: &Matrix) -> Result<Matrix> {
        match self {
            TrainedModel::Single(res, readout) => esn_predict(res, readout, inputs, None),
            TrainedModel::Boost(model) => boost_predict(model, inputs, None),
            TrainedModel::Baseline(model) => baseline_predict(model, inputs),
        }
    }

    /// Every distinct reservoir the model uses.
    pub fn reservoirs(&self) -> Vec<&Reservoir> {
        match self {
            TrainedModel::Single(res, _) => vec![res],
            TrainedModel::Boost(model) => {
                let mut out: Vec<&Reservoir> = Vec::new();
                for s in model.stages() {
                    if !out.iter().any(|r| std::ptr::eq(*r, &*s.reservoir)) {
                        out.push(&s.reservoir);
                    }
                }
                out
            }
            TrainedModel::Baseline(model) => model.members().iter().map(|(r, _)| r).collect(),
        }
    }

    /// Largest `|s_i(t)|` over every reservoir driven by `inputs`.
    pub fn max_abs_state(&self, inputs: &Matrix) -> Result<f64> {
        let mut max = 0.0f64;
        for res in self.reservoirs() {
            let states = run_reservoir(res, inputs, None)?;
            max = states.as_slice().iter().fold(max, |m, v| m.max(v.abs()));
        }
        Ok(max)
    }

    pub fn dump(&self) -> Result<ModelDump> {
        match self {
            TrainedModel::Single(res, readout) => Ok(ModelDump::from(&EnsembleModel::new(vec![(
                res.clone(),
                readout.clone(),
            )])?)),
            TrainedModel::Boost(model) => Ok(ModelDump::from(model)),
            TrainedModel::Baseline(model) => Ok(ModelDump::from(model)),
        }
    }
}

/// Trains the method selected by `cfg` on `train`.
pub fn train_model(cfg: &ExperimentConfig, train: &SeriesDataset) -> Result<TrainedModel> {
    let params = cfg.esn_params();
    Ok(match cfg.method {
        Method::Single => {
            let (res, readout) = crate::boosting::train_single_esn(train, &params, cfg.gamma)?;
            TrainedModel::Single(res, readout)
        }
        Method::Boost => TrainedModel::Boost(l2boost_fit(train, cfg.m_stages, &params, cfg.gamma, cfg.boost_mode)?),
        Method::Baseline => TrainedModel::Baseline(baseline_fit(train, cfg.ensemble_size, &params, cfg.gamma)?),
    })
}

/// Everything a single run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: ResultRecord,
    pub model: TrainedModel,
    pub train: SeriesDataset,
    pub test: SeriesDataset,
    pub train_eval: EvalResult,
    pub test_eval: EvalResult,
}

/// [`run_experiment`] keeping the model and data.
pub fn run_experiment_detailed(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let (train, test, _) = prepare_data(cfg)?;
    let model = train_model(cfg, &train)?;
    let train_eval = evaluate(&model.predict(&train.inputs)?, &train.targets, train.washout)?;
    let test_eval = evaluate(&model.predict(&test.inputs)?, &test.targets, test.washout)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;

    let mut record = ResultRecord::skeleton(cfg);
    record.train_nmse = Metric(Some(train_eval.nmse));
    record.test_nmse = Metric(Some(test_eval.nmse));
    record.train_mse = Metric(Some(train_eval.mse));
    record.test_mse = Metric(Some(test_eval.mse));
    record.wall_ms = (elapsed * 1e3).round() / 1e3;
    Ok(RunOutcome {
        record,
        model,
        train,
        test,
        train_eval,
        test_eval,
    })
}

/// Generates data, trains, and scores one configuration. Deterministic in
/// `cfg` apart from `wall_ms`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    run_experiment_detailed(cfg).map(|o| o.record)
}

/// Cartesian grid of experiment cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    /// Scalar settings shared by every cell.
    pub base: Settings,
    pub benchmarks: Vec<Benchmark>,
    pub methods: Vec<Method>,
    pub n_reservoir: Vec<usize>,
    /// `M` values of boost cells.
    pub boost_stages: Vec<usize>,
    /// `K` values of baseline cells.
    pub ensemble_sizes: Vec<usize>,
    pub repetitions: usize,
    pub parallel: bool,
}

impl SweepGrid {
    /// Splits list-valued keys (`benchmark`, `method`, `n_reservoir`, `M`,
    /// `K`, `m_or_k`) off `settings`; the rest stay scalar. `m_or_k` feeds
    /// whichever of `M` and `K` is not given.
    pub fn from_settings(settings: &Settings) -> Result<SweepGrid> {
        let mut base = settings.clone();
        let benchmarks = base
            .remove("benchmark")
            .ok_or_else(|| Error::param("no benchmark configured"))?
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<Vec<Benchmark>>>()?;
        let methods = base
            .remove("method")
            .unwrap_or_else(|| "boost".into())
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<Vec<Method>>>()?;
        let n_reservoir = match base.remove("n_reservoir") {
            Some(v) => parse_usize_list("n_reservoir", &v)?,
            None => vec![super::config::DEFAULT_N_RESERVOIR],
        };
        let shared = base.remove("m_or_k");
        let mut axis = |key: &str, default: usize| -> Result<Vec<usize>> {
            match base.remove(key).or_else(|| shared.clone()) {
                Some(v) => parse_usize_list(key, &v),
                None => Ok(vec![default]),
            }
        };
        let boost_stages = axis("m", super::config::DEFAULT_BOOST_STAGES)?;
        let ensemble_sizes = axis("k", crate::boosting::DEFAULT_ENSEMBLE_SIZE)?;
        let repetitions = match base.get("repetitions") {
            Some(v) => v
                .parse()
                .map_err(|_| Error::param(format!("invalid repetitions {v:?}")))?,
            None => super::config::DEFAULT_REPETITIONS,
        };
        let parallel = match base.remove("parallel") {
            Some(v) => v
                .parse()
                .map_err(|_| Error::param(format!("parallel must be true or false, got {v:?}")))?,
            None => true,
        };
        if benchmarks.is_empty() || methods.is_empty() || repetitions == 0 {
            return Err(Error::param("sweep grid is empty"));
        }
        Ok(SweepGrid {
            base,
            benchmarks,
            methods,
            n_reservoir,
            boost_stages,
            ensemble_sizes,
            repetitions,
            parallel,
        })
    }

    /// Cells in emission order: benchmark, method, reservoir size, `M`/`K`,
    /// repetition (innermost). Repetition `r` uses seed `seed + r`.
    pub fn cells(&self) -> Result<Vec<ExperimentConfig>> {
        let mut cells = Vec::new();
        for &benchmark in &self.benchmarks {
            let mut settings = self.base.clone();
            settings.insert("benchmark", benchmark.name())?;
            let template = ExperimentConfig::from_settings(&settings)?;
            for &method in &self.methods {
                let mk_axis: &[usize] = match method {
                    Method::Single => &[0],
                    Method::Boost => &self.boost_stages,
                    Method::Baseline => &self.ensemble_sizes,
                };
                for &n_reservoir in &self.n_reservoir {
                    for &mk in mk_axis {
                        for r in 0..self.repetitions {
                            let mut cfg = template.clone();
                            cfg.method = method;
                            cfg.n_reservoir = n_reservoir;
                            match method {
                                Method::Boost => cfg.m_stages = mk,
                                Method::Baseline => cfg.ensemble_size = mk,
                                Method::Single => {}
                            }
                            cfg.seed = template.seed.wrapping_add(r as u64);
                            cfg.validate()?;
                            cells.push(cfg);
                        }
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// Rows of a sweep plus the errors behind any diverged rows.
#[derive(Debug)]
pub struct SweepOutput {
    pub records: Vec<ResultRecord>,
    pub failures: Vec<(String, Error)>,
}

/// Runs every cell of `grid`. Failed cells become `diverged` rows; output order
/// is the grid order whether or not cells run in parallel.
pub fn sweep(grid: &SweepGrid) -> Result<SweepOutput> {
    let cells = grid.cells()?;
    let run = |cfg: &ExperimentConfig| match run_experiment(cfg) {
        Ok(rec) => (rec, None),
        Err(e) => (ResultRecord::diverged(cfg), Some(e)),
    };
    let results: Vec<_> = if grid.parallel {
        cells.par_iter().map(run).collect()
    } else {
        cells.iter().map(run).collect()
    };
    let mut records = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (rec, err) in results {
        if let Some(e) = err {
            failures.push((rec.run_id.clone(), e));
        }
        records.push(rec);
    }
    Ok(SweepOutput { records, failures })
}

/// Writes records with the header row.
pub fn write_records<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(RESULT_COLUMNS).map_err(csv_err)?;
    }
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::data(format!("csv write failed: {e}")))
}

/// Reads a results CSV, checking the header against [`RESULT_COLUMNS`].
pub fn read_records<R: Read>(input: R) -> Result<Vec<ResultRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    for col in RESULT_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Parse {
                line: 1,
                message: format!("missing column {col:?}"),
            });
        }
    }
    if let Some(extra) = headers.iter().find(|h| !RESULT_COLUMNS.contains(h)) {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected column {extra:?}"),
        });
    }
    let index: Vec<usize> = RESULT_COLUMNS
        .iter()
        .map(|c| headers.iter().position(|h| h == *c).expect("checked above"))
        .collect();
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let field = |col: usize| row.get(index[col]).unwrap_or("").trim();
        let bad = |col: usize, what: &str| Error::Parse {
            line,
            message: format!(
                "column {:?}: expected {what}, got {:?}",
                RESULT_COLUMNS[col],
                field(col)
            ),
        };
        let int = |col: usize| field(col).parse::<usize>().map_err(|_| bad(col, "an unsigned integer"));
        let metric = |col: usize| parse_metric(field(col)).ok_or_else(|| bad(col, "a finite number or \"diverged\""));
        out.push(ResultRecord {
            run_id: field(0).to_string(),
            benchmark: field(1).to_string(),
            method: field(2).to_string(),
            n_reservoir: int(3)?,
            m_or_k: int(4)?,
            seed: field(5).parse().map_err(|_| bad(5, "an unsigned integer"))?,
            train_nmse: metric(6)?,
            test_nmse: metric(7)?,
            train_mse: metric(8)?,
            test_mse: metric(9)?,
            wall_ms: field(10)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(10, "a finite number"))?,
        });
    }
    Ok(out)
}

fn parse_metric(text: &str) -> Option<Metric> {
    if text.eq_ignore_ascii_case("diverged") {
        return Some(Metric::DIVERGED);
    }
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(|v| Metric(Some(v)))
}

fn csv_err(e: csv::Error) -> Error {
    Error::data(format!("csv error: {e}"))
}
