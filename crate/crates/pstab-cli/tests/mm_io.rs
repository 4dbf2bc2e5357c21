//! Matrix Market reader/writer behavior.

use std::io::Write;
use std::path::PathBuf;

use proptest::prelude::*;
use tempfile::TempDir;

use pstab::CsrMatrix;
use pstab_cli::mm::{read_matrix_market, write_matrix_market};

fn write_file(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path
}

#[test]
fn symmetric_storage_expands_to_full() {
    let dir = TempDir::new().unwrap();
    let path = write_file(
        &dir,
        "sym.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n\
         2 2 3\n\
         1 1 2.0\n\
         2 1 1.0\n\
         2 2 2.0\n",
    );
    let a = read_matrix_market(&path).unwrap();
    assert_eq!(a.nnz(), 4);
    assert_eq!(a.get(0, 1), 1.0);
    assert_eq!(a.get(1, 0), 1.0);
    assert_eq!(a.get(0, 0), 2.0);
}

#[test]
fn duplicate_entries_are_summed() {
    let dir = TempDir::new().unwrap();
    let path = write_file(
        &dir,
        "dup.mtx",
        "%%MatrixMarket matrix coordinate real general\n\
         1 1 2\n\
         1 1 1.0\n\
         1 1 1.0\n",
    );
    let a = read_matrix_market(&path).unwrap();
    assert_eq!(a.get(0, 0), 2.0);
}

#[test]
fn rectangular_matrix_is_rejected_with_line_number() {
    let dir = TempDir::new().unwrap();
    let path = write_file(
        &dir,
        "rect.mtx",
        "%%MatrixMarket matrix coordinate real general\n\
         % a comment\n\
         3 4 1\n\
         1 1 1.0\n",
    );
    let err = read_matrix_market(&path).unwrap_err().to_string();
    assert!(err.contains("non-square"), "{err}");
    assert!(err.contains(":3:"), "line number missing: {err}");
}

#[test]
fn unsupported_fields_are_rejected() {
    let dir = TempDir::new().unwrap();
    for (name, header) in [
        ("pattern.mtx", "%%MatrixMarket matrix coordinate pattern general"),
        ("complex.mtx", "%%MatrixMarket matrix coordinate complex general"),
        ("array.mtx", "%%MatrixMarket matrix array real general"),
    ] {
        let path = write_file(&dir, name, &format!("{header}\n1 1 1\n1 1 1.0\n"));
        let err = read_matrix_market(&path).unwrap_err().to_string();
        assert!(err.contains(":1:"), "{name}: {err}");
    }
}

#[test]
fn malformed_header_is_rejected() {
    let dir = TempDir::new().unwrap();
    let path = write_file(&dir, "bad.mtx", "%%NotMatrixMarket\n1 1 1\n1 1 1.0\n");
    let err = read_matrix_market(&path).unwrap_err().to_string();
    assert!(err.contains("header"), "{err}");
}

#[test]
fn bad_entry_reports_its_line() {
    let dir = TempDir::new().unwrap();
    let path = write_file(
        &dir,
        "badentry.mtx",
        "%%MatrixMarket matrix coordinate real general\n\
         2 2 2\n\
         1 1 1.0\n\
         2 oops 1.0\n",
    );
    let err = read_matrix_market(&path).unwrap_err().to_string();
    assert!(err.contains(":4:"), "{err}");
}

#[test]
fn entry_count_mismatch_is_rejected() {
    let dir = TempDir::new().unwrap();
    let path = write_file(
        &dir,
        "short.mtx",
        "%%MatrixMarket matrix coordinate real general\n\
         2 2 2\n\
         1 1 1.0\n",
    );
    let err = read_matrix_market(&path).unwrap_err().to_string();
    assert!(err.contains("expected 2 entries"), "{err}");
}

#[test]
fn out_of_range_index_is_rejected() {
    let dir = TempDir::new().unwrap();
    let path = write_file(
        &dir,
        "range.mtx",
        "%%MatrixMarket matrix coordinate real general\n\
         2 2 1\n\
         3 1 1.0\n",
    );
    assert!(read_matrix_market(&path).is_err());
}

#[test]
fn one_based_indexing_round_trips() {
    let dir = TempDir::new().unwrap();
    let a = CsrMatrix::from_triplets(3, &[(0, 0, 1.5), (0, 2, -2.25), (2, 1, 0.125)]).unwrap();
    let path = dir.path().join("rt.mtx");
    write_matrix_market(&path, &a).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("1 1 1.5"));
    assert!(text.contains("1 3 -2.25"));
    let back = read_matrix_market(&path).unwrap();
    assert_eq!(a, back);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// write → read is the identity on CSR content, including values that
    /// need every bit of the mantissa.
    #[test]
    fn roundtrip_is_identity(
        entries in proptest::collection::vec((0usize..8, 0usize..8, -1e6f64..1e6), 1..30)
    ) {
        let a = CsrMatrix::from_triplets(8, &entries).unwrap();
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("prop.mtx");
        write_matrix_market(&path, &a).unwrap();
        let back = read_matrix_market(&path).unwrap();
        prop_assert_eq!(a, back);
    }
}
