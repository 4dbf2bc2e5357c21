//! Experiment harness around the `pstab` library: Matrix Market and CSV
//! ingestion, synthetic fixtures, config handling, and the three run modes
//! (sparse, kernel, estimate) with JSON/CSV reports.

pub mod config;
pub mod dataset_io;
pub mod error;
pub mod estimate;
pub mod kernel_exp;
pub mod loaders;
pub mod mm;
pub mod report;
pub mod sparse_exp;
pub mod synth;

pub use config::{Algorithm, ConfigFile, ExperimentConfig, Mode};
pub use error::{AppError, AppResult};
