//! Experiment orchestration behind the `reinforced-perc` binary: TOML
//! configs, the run loop with its CSV and manifest outputs, and the
//! self-check suites.

mod config;
mod run;
mod tables;
mod verify;

pub use config::{EstimatorConfig, ExperimentConfig, QEntry, RegionConfig};
pub use run::{
    config_hash, dump_environment, execute, run, EstimateRow, Manifest, RunOptions, RunSummary,
    CSV_HEADER, ESTIMATES_FILE, MANIFEST_FILE, PARTIAL_MARKER,
};
pub use tables::{bounds_table, BoundsRequest};
pub use verify::{any_failed, render, run_suite, Check, Suite, Verdict, VerifyOptions, MIN_POWERED_REPLICAS};
