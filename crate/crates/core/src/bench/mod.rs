//! Seeded instance generation, experiment orchestration and CSV reports.

mod experiment;
mod generator;

pub use experiment::{
    default_time_limit, run_experiment, run_on_instances, to_csv, ExperimentConfig, GapRow, CSV_HEADER, CSV_VERSION,
};
pub use generator::{generate, AlphaClass, GeneratorSpec, DEFAULT_REPLICATIONS, PROCESSING_RANGE};
