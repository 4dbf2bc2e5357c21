//! Column-major dense matrices and the small factorizations everything else
//! is built from: Cholesky for the pinch blocks, Gram–Schmidt and a Jacobi
//! eigensolver for the randomized low-rank approximation.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Dense matrix with column-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_column_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// `y = A·x`.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        y.fill(0.0);
        for j in 0..self.cols {
            axpy(x[j], self.col(j), y);
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    /// `y = Aᵀ·x`.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        (0..self.cols).map(|j| dot(self.col(j), x)).collect()
    }

    /// `A·B`.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let oj = other.col(j);
            let cj = out.col_mut(j);
            for (l, &blj) in oj.iter().enumerate() {
                if blj != 0.0 {
                    axpy(blj, self.col(l), cj);
                }
            }
        }
        out
    }

    /// `Aᵀ·B`.
    pub fn transpose_matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = DenseMatrix::zeros(self.cols, other.cols);
        for j in 0..other.cols {
            for i in 0..self.cols {
                out.set(i, j, dot(self.col(i), other.col(j)));
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
///
/// `factor` returns `None` when a pivot is not strictly positive, which is
/// how non-SPD blocks are detected and reported by the preconditioners.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>, // column-major, lower triangle holds L
}

impl Cholesky {
    pub fn factor(a: &DenseMatrix) -> Option<Cholesky> {
        assert_eq!(a.rows(), a.cols());
        let n = a.rows();
        let mut l = a.data.clone();
        for j in 0..n {
            let mut d = l[j * n + j];
            for k in 0..j {
                let ljk = l[k * n + j];
                d -= ljk * ljk;
            }
            if !(d > 0.0) {
                return None;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = l[j * n + i];
                for k in 0..j {
                    s -= l[k * n + i] * l[k * n + j];
                }
                l[j * n + i] = s / d;
            }
        }
        // zero the strict upper triangle so the factor is self-describing
        for j in 1..n {
            for i in 0..j {
                l[j * n + i] = 0.0;
            }
        }
        Some(Cholesky { n, l })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Solves `L·Lᵀ x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        assert_eq!(x.len(), n);
        // forward: L y = b
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        // backward: Lᵀ x = y
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[i * n + k] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Orthonormalizes the columns of `m` by modified Gram–Schmidt with one
/// re-orthogonalization pass. Columns that become numerically dependent are
/// dropped, so the result can have fewer columns than the input.
pub fn orthonormal_columns(m: &DenseMatrix) -> DenseMatrix {
    let rows = m.rows();
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(m.cols());
    let scale = m
        .data
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let drop_tol = 1e-12 * scale * (rows as f64).sqrt();
    for j in 0..m.cols() {
        let mut v = m.col(j).to_vec();
        for _ in 0..2 {
            for q in &kept {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
        }
        let nrm = norm2(&v);
        if nrm > drop_tol {
            let inv = 1.0 / nrm;
            for x in &mut v {
                *x *= inv;
            }
            kept.push(v);
        }
    }
    let mut out = DenseMatrix::zeros(rows, kept.len());
    for (j, v) in kept.iter().enumerate() {
        out.col_mut(j).copy_from_slice(v);
    }
    out
}

/// Full eigendecomposition of a small symmetric matrix by cyclic Jacobi
/// rotations. Returns eigenvalues in descending order together with the
/// matching orthonormal eigenvector columns.
pub fn sym_eigen(a: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    let mut w = a.clone();
    let mut v = DenseMatrix::identity(n);
    if n <= 1 {
        let vals = if n == 1 { vec![w.get(0, 0)] } else { vec![] };
        return (vals, v);
    }
    let frob = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * frob;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += w.get(p, q) * w.get(p, q);
            }
        }
        if (2.0 * off).sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w.get(p, q);
                if apq.abs() <= tol / (n as f64) {
                    continue;
                }
                let app = w.get(p, p);
                let aqq = w.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotate rows/columns p and q of w
                for i in 0..n {
                    let wip = w.get(i, p);
                    let wiq = w.get(i, q);
                    w.set(i, p, c * wip - s * wiq);
                    w.set(i, q, s * wip + c * wiq);
                }
                for i in 0..n {
                    let wpi = w.get(p, i);
                    let wqi = w.get(q, i);
                    w.set(p, i, c * wpi - s * wqi);
                    w.set(q, i, s * wpi + c * wqi);
                }
                // accumulate eigenvectors
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w.get(j, j).partial_cmp(&w.get(i, i)).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| w.get(i, i)).collect();
    let mut vecs = DenseMatrix::zeros(n, n);
    for (jnew, &jold) in order.iter().enumerate() {
        vecs.col_mut(jnew).copy_from_slice(v.col(jold));
    }
    (vals, vecs)
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// `y += alpha * x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
