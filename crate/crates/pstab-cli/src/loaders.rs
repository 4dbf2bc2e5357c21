//! Resolving matrix and dataset fields: filesystem paths or `synth:` specs.

use std::path::Path;

use pstab::kernel::Dataset;
use pstab::CsrMatrix;

use crate::error::AppResult;
use crate::{dataset_io, mm, synth};

pub fn load_matrix(spec: &str, seed: u64) -> AppResult<CsrMatrix> {
    if synth::is_synthetic(spec) {
        synth::synth_matrix(spec, seed)
    } else {
        mm::read_matrix_market(Path::new(spec))
    }
}

pub fn load_dataset(
    spec: &str,
    target_column: Option<&str>,
    seed: u64,
) -> AppResult<Dataset> {
    if synth::is_synthetic(spec) {
        synth::synth_dataset(spec, seed)
    } else {
        dataset_io::read_csv_dataset(Path::new(spec), target_column)
    }
}
