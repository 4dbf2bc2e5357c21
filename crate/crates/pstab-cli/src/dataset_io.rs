//! CSV dataset ingestion: a header row, numeric columns, one designated
//! target column (the last column when none is named).

use std::path::Path;

use pstab::kernel::Dataset;

use crate::error::{AppError, AppResult};

pub fn read_csv_dataset(path: &Path, target_column: Option<&str>) -> AppResult<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| AppError::config(format!("cannot open {}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| AppError::config(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.len() < 2 {
        return Err(AppError::config(format!(
            "{}: need at least one feature column and one target column",
            path.display()
        )));
    }
    let target_idx = match target_column {
        None => headers.len() - 1,
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| {
                AppError::config(format!(
                    "{}: target column '{name}' not found (columns: {})",
                    path.display(),
                    headers.join(", ")
                ))
            })?,
    };

    let n_features = headers.len() - 1;
    let mut points = Vec::new();
    let mut targets = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| AppError::config(format!("{}: {e}", path.display())))?;
        if record.len() != headers.len() {
            return Err(AppError::config(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                row_no + 2,
                record.len(),
                headers.len()
            )));
        }
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                AppError::config(format!(
                    "{}: row {}, column '{}': cannot parse '{field}' as a number",
                    path.display(),
                    row_no + 2,
                    headers[col]
                ))
            })?;
            if col == target_idx {
                targets.push(value);
            } else {
                points.push(value);
            }
        }
    }
    if targets.is_empty() {
        return Err(AppError::config(format!("{}: no data rows", path.display())));
    }
    Ok(Dataset::new(targets.len(), n_features, points, targets)?)
}
