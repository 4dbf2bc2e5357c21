//! Compressed sparse row storage for the system matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::perm::Permutation;

/// Immutable square sparse matrix in CSR form.
///
/// Invariants are checked at construction: `row_ptr` is non-decreasing with
/// `row_ptr[0] = 0` and `row_ptr[dim] = nnz`, column indices are strictly
/// increasing within each row and in `[0, dim)`, and all values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        dim: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if row_ptr.len() != dim + 1 {
            return Err(Error::LengthMismatch {
                expected: dim + 1,
                got: row_ptr.len(),
            });
        }
        if col_idx.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: col_idx.len(),
                got: values.len(),
            });
        }
        if row_ptr[0] != 0 || row_ptr[dim] != col_idx.len() {
            return Err(Error::InvalidParameter(
                "row_ptr must start at 0 and end at nnz".into(),
            ));
        }
        for i in 0..dim {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidParameter("row_ptr must be non-decreasing".into()));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            for w in cols.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidParameter(
                        "column indices must be strictly increasing within a row".into(),
                    ));
                }
            }
            if let Some(&last) = cols.last() {
                if last >= dim {
                    return Err(Error::InvalidParameter("column index out of range".into()));
                }
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix values must be finite".into()));
        }
        Ok(CsrMatrix {
            dim,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Builds a CSR matrix from `(row, col, value)` triplets, summing
    /// duplicate coordinates.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        for &(r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::InvalidParameter(alloc::format!(
                    "entry ({r}, {c}) out of range for dimension {dim}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter("matrix values must be finite".into()));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut counts = vec![0usize; dim];
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in &sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                counts[r] += 1;
                last = Some((r, c));
            }
        }
        let mut row_ptr = vec![0usize; dim + 1];
        for i in 0..dim {
            row_ptr[i + 1] = row_ptr[i] + counts[i];
        }
        CsrMatrix::new(dim, row_ptr, col_idx, values)
    }

    pub fn identity(dim: usize) -> Self {
        let triplets: Vec<(usize, usize, f64)> = (0..dim).map(|i| (i, i, 1.0)).collect();
        CsrMatrix::from_triplets(dim, &triplets).expect("identity is always valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Entry lookup by binary search within the row.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// `y = A·x` in a single pass over the stored entries.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[i] = acc;
        }
    }

    /// `A·x`, checking the dimension of `x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.dim];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out.set(i, c, v);
            }
        }
        out
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&c, &v)| (i, c, v))
        })
    }

    /// The symmetric permutation `P·A·Pᵀ` in the ordering described by `perm`
    /// (`perm[new] = old`).
    pub fn permute_symmetric(&self, perm: &Permutation) -> Result<CsrMatrix> {
        if perm.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: perm.len(),
            });
        }
        let inv = perm.inverse();
        let inv = inv.as_slice();
        let triplets: Vec<(usize, usize, f64)> = self
            .triplets()
            .map(|(r, c, v)| (inv[r], inv[c], v))
            .collect();
        CsrMatrix::from_triplets(self.dim, &triplets)
    }

    /// Dense copy of the diagonal block `A[start..start+len, start..start+len]`.
    pub fn dense_diag_block(&self, start: usize, len: usize) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(len, len);
        for i in 0..len {
            let (cols, vals) = self.row(start + i);
            for (&c, &v) in cols.iter().zip(vals) {
                if c >= start && c < start + len {
                    out.set(i, c - start, v);
                }
            }
        }
        out
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        self.spmv_into(x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn spmv_identity() {
        let a = CsrMatrix::identity(3);
        let y = a.spmv(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(y, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn spmv_diagonal() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (1, 1, 3.0)]).unwrap();
        let y = a.spmv(&[1.0, 1.0]).unwrap();
        assert_eq!(y, vec![2.0, 3.0]);
    }

    #[test]
    fn spmv_matches_dense_multiply() {
        // random 5×5 pattern with 12 stored entries
        let triplets = [
            (0, 1, 1.5),
            (0, 4, -2.0),
            (1, 0, 0.5),
            (1, 1, 3.0),
            (2, 2, -1.0),
            (2, 3, 2.5),
            (3, 0, 1.0),
            (3, 3, 4.0),
            (3, 4, -0.5),
            (4, 1, 2.0),
            (4, 2, 0.25),
            (4, 4, 1.0),
        ];
        let a = CsrMatrix::from_triplets(5, &triplets).unwrap();
        assert_eq!(a.nnz(), 12);
        let x = [0.3, -1.2, 2.0, 0.7, -0.4];
        let y = a.spmv(&x).unwrap();
        // dense multiplication oracle
        let dense = a.to_dense();
        for i in 0..5 {
            let mut expect = 0.0;
            for j in 0..5 {
                expect += dense.get(i, j) * x[j];
            }
            assert_abs_diff_eq!(y[i], expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(a.get(0, 0), 2.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = CsrMatrix::identity(3);
        assert!(matches!(
            a.spmv(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn invalid_csr_is_rejected() {
        // unsorted columns within a row
        assert!(CsrMatrix::new(2, vec![0, 2, 2], vec![1, 0], vec![1.0, 2.0]).is_err());
        // non-finite value
        assert!(CsrMatrix::from_triplets(1, &[(0, 0, f64::NAN)]).is_err());
        // out-of-range index
        assert!(CsrMatrix::from_triplets(2, &[(0, 5, 1.0)]).is_err());
    }

    #[test]
    fn symmetric_permutation_matches_dense() {
        let triplets = [
            (0, 0, 4.0),
            (0, 2, 1.0),
            (1, 1, 3.0),
            (2, 0, 1.0),
            (2, 2, 5.0),
        ];
        let a = CsrMatrix::from_triplets(3, &triplets).unwrap();
        let p = Permutation::from_vec(vec![2, 0, 1]).unwrap();
        let ap = a.permute_symmetric(&p).unwrap();
        let d = a.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(ap.get(i, j), d.get(p.as_slice()[i], p.as_slice()[j]));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// spmv applied to basis vectors reconstructs the columns reported by
        /// the dense conversion.
        #[test]
        fn spmv_reconstructs_columns(
            entries in proptest::collection::vec((0usize..6, 0usize..6, -10.0f64..10.0), 1..20)
        ) {
            let a = CsrMatrix::from_triplets(6, &entries).unwrap();
            let dense = a.to_dense();
            for j in 0..6 {
                let mut e = [0.0; 6];
                e[j] = 1.0;
                let col = a.spmv(&e).unwrap();
                for i in 0..6 {
                    prop_assert!((col[i] - dense.get(i, j)).abs() < 1e-12);
                }
            }
        }
    }
}
