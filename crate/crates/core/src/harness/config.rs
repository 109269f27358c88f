//! Experiment configuration.
//!
//! Settings come from three layers: built-in per-benchmark defaults, a flat
//! TOML file, and `key=value` overrides. Later layers win. Because defaults
//! depend on the benchmark, all layers are first collected as raw key/value
//! pairs and resolved once the benchmark is known.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::boosting::{BoostMode, DEFAULT_ENSEMBLE_SIZE};
use crate::datasets::{Benchmark, HENON_NOISE_STD};
use crate::error::{Error, Result};
use crate::esn::{EsnParams, DEFAULT_INPUT_RANGE, DEFAULT_RESERVOIR_DENSITY, DEFAULT_RESERVOIR_RANGE};

pub const DEFAULT_REPETITIONS: usize = 10;
pub const DEFAULT_N_RESERVOIR: usize = 50;
pub const DEFAULT_BOOST_STAGES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Single,
    Boost,
    Baseline,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Single => "single",
            Method::Boost => "boost",
            Method::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "single" | "esn" => Ok(Method::Single),
            "boost" | "l2boost" => Ok(Method::Boost),
            "baseline" | "ensemble" | "average" => Ok(Method::Baseline),
            _ => Err(Error::param(format!(
                "unknown method {s:?}; expected single, boost or baseline"
            ))),
        }
    }
}

/// One fully resolved experiment cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub benchmark: Benchmark,
    pub method: Method,
    pub n_reservoir: usize,
    /// Residual stages `M` (boost only).
    pub m_stages: usize,
    /// Ensemble size `K` (baseline only).
    pub ensemble_size: usize,
    pub gamma: f64,
    pub washout: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
    pub boost_mode: BoostMode,
    pub repetitions: usize,
    pub input_range: (f64, f64),
    pub reservoir_range: (f64, f64),
    pub reservoir_density: f64,
    pub noise_std: f64,
    /// Laser recording to load instead of the bundled one.
    pub laser_file: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for `benchmark`, including its washout, ridge penalty and
    /// train/test sizes.
    pub fn for_benchmark(benchmark: Benchmark) -> Self {
        let d = benchmark.defaults();
        ExperimentConfig {
            benchmark,
            method: Method::Boost,
            n_reservoir: DEFAULT_N_RESERVOIR,
            m_stages: DEFAULT_BOOST_STAGES,
            ensemble_size: DEFAULT_ENSEMBLE_SIZE,
            gamma: d.gamma,
            washout: d.washout,
            n_train: d.n_train,
            n_test: d.n_test,
            seed: 0,
            boost_mode: BoostMode::Fresh,
            repetitions: DEFAULT_REPETITIONS,
            input_range: DEFAULT_INPUT_RANGE,
            reservoir_range: DEFAULT_RESERVOIR_RANGE,
            reservoir_density: DEFAULT_RESERVOIR_DENSITY,
            noise_std: HENON_NOISE_STD,
            laser_file: None,
        }
    }

    /// Resolves a config from raw settings; `benchmark` is required.
    pub fn from_settings(settings: &Settings) -> Result<Self> {
        let benchmark: Benchmark = settings
            .get("benchmark")
            .ok_or_else(|| Error::param("no benchmark configured"))?
            .parse()?;
        let mut cfg = ExperimentConfig::for_benchmark(benchmark);
        for (key, value) in settings.iter() {
            if key != "benchmark" {
                cfg.set(key, value)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match canonical_key(key)? {
            "benchmark" => self.benchmark = value.parse()?,
            "method" => self.method = value.parse()?,
            "n_reservoir" => self.n_reservoir = parse_num(key, value)?,
            "m_or_k" => {
                let v = parse_num(key, value)?;
                match self.method {
                    Method::Baseline => self.ensemble_size = v,
                    _ => self.m_stages = v,
                }
            }
            "m" => self.m_stages = parse_num(key, value)?,
            "k" => self.ensemble_size = parse_num(key, value)?,
            "gamma" => self.gamma = parse_num(key, value)?,
            "washout" => self.washout = parse_num(key, value)?,
            "n_train" => self.n_train = parse_num(key, value)?,
            "n_test" => self.n_test = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "boost_mode" => self.boost_mode = value.parse()?,
            "repetitions" => self.repetitions = parse_num(key, value)?,
            "input_range" => self.input_range = parse_pair(key, value)?,
            "reservoir_range" => self.reservoir_range = parse_pair(key, value)?,
            "reservoir_density" => self.reservoir_density = parse_num(key, value)?,
            "noise_std" => self.noise_std = parse_num(key, value)?,
            "laser_file" => self.laser_file = Some(PathBuf::from(value)),
            "parallel" => {}
            other => unreachable!("canonical key {other} not handled"),
        }
        Ok(())
    }

    /// `M` for boost, `K` for baseline, 0 for a single ESN.
    pub fn m_or_k(&self) -> usize {
        match self.method {
            Method::Single => 0,
            Method::Boost => self.m_stages,
            Method::Baseline => self.ensemble_size,
        }
    }

    /// ESN parameters of the stage-0 / first-member reservoir.
    pub fn esn_params(&self) -> EsnParams {
        EsnParams {
            n_inputs: self.benchmark.n_inputs(),
            n_reservoir: self.n_reservoir,
            n_outputs: 1,
            input_range: self.input_range,
            reservoir_range: self.reservoir_range,
            reservoir_density: self.reservoir_density,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.esn_params().validate()?;
        if self.method == Method::Baseline && self.ensemble_size == 0 {
            return Err(Error::param("baseline needs K >= 1"));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::param(format!(
                "gamma must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        if self.washout >= self.n_train || self.washout >= self.n_test {
            return Err(Error::param(format!(
                "washout {} must be shorter than both train ({}) and test ({}) segments",
                self.washout, self.n_train, self.n_test
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::param("repetitions must be >= 1"));
        }
        if !self.noise_std.is_finite() || self.noise_std < 0.0 {
            return Err(Error::param(format!("invalid noise_std {}", self.noise_std)));
        }
        Ok(())
    }
}

const KEYS: &[(&str, &[&str])] = &[
    ("benchmark", &["benchmark", "task"]),
    ("method", &["method"]),
    ("n_reservoir", &["n_reservoir", "reservoir_size", "ns"]),
    ("m_or_k", &["m_or_k"]),
    ("m", &["m", "m_stages", "epochs"]),
    ("k", &["k", "ensemble_size"]),
    ("gamma", &["gamma"]),
    ("washout", &["washout"]),
    ("n_train", &["n_train", "train_samples"]),
    ("n_test", &["n_test", "test_samples"]),
    ("seed", &["seed"]),
    ("boost_mode", &["boost_mode", "mode"]),
    ("repetitions", &["repetitions", "reps"]),
    ("input_range", &["input_range"]),
    ("reservoir_range", &["reservoir_range"]),
    ("reservoir_density", &["reservoir_density", "density"]),
    ("noise_std", &["noise_std", "henon_noise_std"]),
    ("laser_file", &["laser_file", "laser_path"]),
    ("parallel", &["parallel"]),
];

/// Maps accepted spellings (case-insensitive; `M` and `K` included) to the
/// canonical key.
pub fn canonical_key(key: &str) -> Result<&'static str> {
    let k = key.trim().to_ascii_lowercase().replace('-', "_");
    KEYS.iter()
        .find(|(_, aliases)| aliases.contains(&k.as_str()))
        .map(|(canon, _)| *canon)
        .ok_or_else(|| Error::param(format!("unknown configuration key {key:?}")))
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::param(format!("invalid value {value:?} for {key}")))
}

fn parse_pair(key: &str, value: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = value
        .trim_matches(|c| c == '[' || c == ']' || c == '(' || c == ')')
        .split(',')
        .map(str::trim)
        .collect();
    match parts.as_slice() {
        [lo, hi] => Ok((parse_num(key, lo)?, parse_num(key, hi)?)),
        _ => Err(Error::param(format!("{key} expects \"lo,hi\", got {value:?}"))),
    }
}

/// Ordered raw settings; a later value for the same key replaces an earlier one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    entries: Vec<(&'static str, String)>,
}

impl Settings {
    pub fn new() -> Self {
        Settings::default()
    }

    pub fn insert(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let canon = canonical_key(key)?;
        let value = value.into();
        match self.entries.iter_mut().find(|(k, _)| *k == canon) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((canon, value)),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        let canon = canonical_key(key).ok()?;
        self.entries.iter().find(|(k, _)| *k == canon).map(|(_, v)| v.as_str())
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        let canon = canonical_key(key).ok()?;
        let pos = self.entries.iter().position(|(k, _)| *k == canon)?;
        Some(self.entries.remove(pos).1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &str)> {
        self.entries.iter().map(|(k, v)| (*k, v.as_str()))
    }

    /// Parses a flat TOML document. Arrays become comma-separated lists.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
            line: e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count().max(1))
                .unwrap_or(0),
            message: e.message().to_string(),
        })?;
        let mut settings = Settings::new();
        for (key, value) in table {
            settings.insert(&key, toml_scalar(&key, &value)?)?;
        }
        Ok(settings)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Settings::from_toml_str(&text)
    }

    /// Applies `key=value` overrides.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for item in overrides {
            let item = item.as_ref();
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::param(format!("override {item:?} is not key=value")))?;
            self.insert(k, v.trim())?;
        }
        Ok(())
    }
}

fn toml_scalar(key: &str, value: &toml::Value) -> Result<String> {
    use toml::Value;
    Ok(match value {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => f.to_string(),
        Value::Boolean(b) => b.to_string(),
        Value::Array(items) => items
            .iter()
            .map(|v| toml_scalar(key, v))
            .collect::<Result<Vec<_>>>()?
            .join(","),
        other => {
            return Err(Error::param(format!(
                "configuration key {key} has unsupported value {other}"
            )))
        }
    })
}

/// Expands `"6..=12"`, `"6..13"`, `"3,4,5"` or `"8"` into a list.
pub fn parse_usize_list(key: &str, value: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..=") {
            let (lo, hi): (usize, usize) = (parse_num(key, lo.trim())?, parse_num(key, hi.trim())?);
            out.extend(lo..=hi);
        } else if let Some((lo, hi)) = part.split_once("..") {
            let (lo, hi): (usize, usize) = (parse_num(key, lo.trim())?, parse_num(key, hi.trim())?);
            out.extend(lo..hi);
        } else {
            out.push(parse_num(key, part)?);
        }
    }
    if out.is_empty() {
        return Err(Error::param(format!("{key} list is empty")));
    }
    Ok(out)
}
