//! Experiment configuration, runs, sweeps and reports.

pub mod config;
pub mod report;
pub mod runner;

pub use config::{ExperimentConfig, Method, Settings};
pub use runner::{
    prepare_data, read_records, run_experiment, run_experiment_detailed, sweep, train_model, write_records, Metric,
    ResultRecord, RunOutcome, SweepGrid, SweepOutput, TrainedModel, RESULT_COLUMNS,
};
