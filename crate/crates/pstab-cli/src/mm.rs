//! Matrix Market coordinate-format reader and writer.
//!
//! Supports `%%MatrixMarket matrix coordinate real {general|symmetric}` with
//! 1-based indices. Symmetric files are expanded to full storage on read and
//! duplicate coordinates are summed, so the result always satisfies the CSR
//! invariants. Parse errors carry the offending line number.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use pstab::CsrMatrix;

use crate::error::{AppError, AppResult};

fn parse_error(path: &Path, line_no: usize, msg: impl AsRef<str>) -> AppError {
    AppError::config(format!(
        "{}:{line_no}: {}",
        path.display(),
        msg.as_ref()
    ))
}

pub fn read_matrix_market(path: &Path) -> AppResult<CsrMatrix> {
    let file = File::open(path)
        .map_err(|e| AppError::config(format!("cannot open {}: {e}", path.display())))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    // header line
    let (idx, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, "empty file"))?;
    let header = header.map_err(|e| parse_error(path, idx + 1, e.to_string()))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" {
        return Err(parse_error(
            path,
            1,
            "header must start with '%%MatrixMarket matrix coordinate ...'",
        ));
    }
    if fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(parse_error(
            path,
            1,
            format!("unsupported object/format '{} {}'; only 'matrix coordinate' is supported", fields[1], fields[2]),
        ));
    }
    if fields[3] != "real" {
        return Err(parse_error(
            path,
            1,
            format!("unsupported field type '{}'; only 'real' is supported", fields[3]),
        ));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(parse_error(
                path,
                1,
                format!("unsupported symmetry '{other}'; expected 'general' or 'symmetric'"),
            ))
        }
    };

    // dimensions line (comments and blanks may precede it)
    let mut dims: Option<(usize, usize, usize)> = None;
    let mut dims_line = 0usize;
    for (idx, line) in &mut lines {
        let line = line.map_err(|e| parse_error(path, idx + 1, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = trimmed.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_error(path, idx + 1, "expected 'rows cols nnz'"));
        }
        let rows: usize = parts[0]
            .parse()
            .map_err(|_| parse_error(path, idx + 1, "cannot parse row count"))?;
        let cols: usize = parts[1]
            .parse()
            .map_err(|_| parse_error(path, idx + 1, "cannot parse column count"))?;
        let nnz: usize = parts[2]
            .parse()
            .map_err(|_| parse_error(path, idx + 1, "cannot parse entry count"))?;
        dims = Some((rows, cols, nnz));
        dims_line = idx + 1;
        break;
    }
    let (rows, cols, nnz) = dims.ok_or_else(|| parse_error(path, 1, "missing size line"))?;
    if rows != cols {
        return Err(parse_error(
            path,
            dims_line,
            format!("non-square matrix: {rows}x{cols}"),
        ));
    }
    if rows == 0 {
        return Err(parse_error(path, dims_line, "matrix dimension is zero"));
    }

    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * nnz);
    let mut read = 0usize;
    for (idx, line) in &mut lines {
        let line = line.map_err(|e| parse_error(path, idx + 1, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if read == nnz {
            return Err(parse_error(path, idx + 1, "more entries than declared"));
        }
        let parts: Vec<&str> = trimmed.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_error(path, idx + 1, "expected 'i j value'"));
        }
        let i: usize = parts[0]
            .parse()
            .map_err(|_| parse_error(path, idx + 1, "cannot parse row index"))?;
        let j: usize = parts[1]
            .parse()
            .map_err(|_| parse_error(path, idx + 1, "cannot parse column index"))?;
        let v: f64 = parts[2]
            .parse()
            .map_err(|_| parse_error(path, idx + 1, "cannot parse value"))?;
        if i < 1 || i > rows || j < 1 || j > cols {
            return Err(parse_error(
                path,
                idx + 1,
                format!("index ({i}, {j}) outside 1..={rows}"),
            ));
        }
        if !v.is_finite() {
            return Err(parse_error(path, idx + 1, "value is not finite"));
        }
        triplets.push((i - 1, j - 1, v));
        if symmetric && i != j {
            triplets.push((j - 1, i - 1, v));
        }
        read += 1;
    }
    if read != nnz {
        return Err(AppError::config(format!(
            "{}: expected {nnz} entries, found {read}",
            path.display()
        )));
    }
    CsrMatrix::from_triplets(rows, &triplets).map_err(AppError::from)
}

/// Writes full (general) storage with 1-based indices. Values use the
/// shortest representation that round-trips through `f64`.
pub fn write_matrix_market(path: &Path, a: &CsrMatrix) -> AppResult<()> {
    let file = File::create(path)
        .map_err(|e| AppError::config(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.dim(), a.dim(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(w, "{} {} {}", i + 1, j + 1, v)?;
    }
    Ok(())
}
