//! L2-Boost over weak echo state networks for one-step-ahead time-series
//! regression, with an averaging-ensemble baseline, the benchmark series it is
//! evaluated on, and an experiment harness that sweeps reservoir sizes and
//! boosting depths into CSV.
//!
//! The modules build on each other bottom-up:
//!
//! * [`numerics`]: seeded RNG, dense matrices, ridge regression.
//! * [`datasets`]: NARMA, Hénon, Freedman and laser series, normalization,
//!   supervised wiring and splits.
//! * [`esn`]: reservoir construction, state expansion, readout prediction.
//! * [`boosting`]: L2-Boost fitting/prediction and the baseline ensemble.
//! * [`metrics`]: NMSE, MSE, NRMSE.
//! * [`harness`]: configs, single runs, sweeps and reports.

#![allow(clippy::needless_range_loop)]

pub mod boosting;
pub mod datasets;
pub mod error;
pub mod esn;
pub mod harness;
pub mod metrics;
pub mod numerics;

pub use error::{Error, Result};
