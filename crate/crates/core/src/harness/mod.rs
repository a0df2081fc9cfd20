//! Experiment configs, reports, the concentration checker and the pipelines
//! behind the `gapchain` binary.
//!
//! A config is a TOML file with one table per module. Running it produces a
//! [`Report`]; `metrics.json` holds everything except wall-clock timings and
//! is byte-identical across reruns of the same config.

mod concentration;
mod config;
mod pipeline;
mod report;

pub use concentration::{bernoulli_groups, concentration_check, ConcentrationReport};
pub use config::{
    ClassChoice, ConstructConfig, CoverConfig, ExperimentConfig, GkConfig, MaierConfig, Mode,
    OutputConfig, PartitionConfig, PrimesConfig, SieveConfig, VerifyConfig, WeightsConfig,
};
pub use pipeline::{run_and_write, run_experiment, NORMALIZATION_TOLERANCE};
pub use report::{Check, Report, Table};
