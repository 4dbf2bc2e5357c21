//! Kernel-regression systems `(K + σₙ²I)·α = y` under the squared
//! exponential kernel, and the two geometrically driven preconditioners for
//! them: a cluster-permuted block pinch, and the same pinch plus a low-rank
//! correction solved through the Woodbury identity.

mod experiment;
mod geometric;
mod kmeans;
mod lowrank;

pub use experiment::{
    grid_cells, grid_cluster_count, kernel_cell, kernel_experiment, kernel_stopping_rule,
    KernelCell, KernelGridParams,
};
pub use geometric::{
    geometric_block_precond, geometric_lowrank_precond, woodbury_apply, GeometricPreconditioner,
};
pub use kmeans::{kmeans_cluster, Clustering};
pub use lowrank::lowrank_approx;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::operator::LinearOperator;

/// A regression dataset: `n` points in `ℝᵖ` with one scalar target each.
#[derive(Debug, Clone)]
pub struct Dataset {
    n_points: usize,
    n_features: usize,
    points: Vec<f64>, // row-major: point i occupies [i·p, (i+1)·p)
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(n_points: usize, n_features: usize, points: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        if n_points < 1 || n_features < 1 {
            return Err(Error::InvalidParameter(
                "dataset needs at least one point and one feature".into(),
            ));
        }
        if points.len() != n_points * n_features {
            return Err(Error::LengthMismatch {
                expected: n_points * n_features,
                got: points.len(),
            });
        }
        if targets.len() != n_points {
            return Err(Error::LengthMismatch {
                expected: n_points,
                got: targets.len(),
            });
        }
        if points.iter().chain(targets.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("dataset entries must be finite".into()));
        }
        Ok(Dataset {
            n_points,
            n_features,
            points,
            targets,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn squared_distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.point(i), self.point(j));
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    }
}

/// The dense regularized kernel operator `K + σₙ²·I` with
/// `K_ij = exp(−‖xᵢ−xⱼ‖²/(2ℓ²))`.
#[derive(Debug, Clone)]
pub struct KernelSystem {
    gram: DenseMatrix,
    noise: f64,
    length_scale: f64,
}

impl KernelSystem {
    pub fn gram(&self) -> &DenseMatrix {
        &self.gram
    }

    /// σₙ², the regularization added to the diagonal.
    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }
}

impl LinearOperator for KernelSystem {
    fn dim(&self) -> usize {
        self.gram.rows()
    }

    fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        self.gram.matvec_into(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += self.noise * xi;
        }
    }
}

/// Builds the squared exponential Gram system for the dataset. The diagonal
/// is set to exactly 1 rather than trusting `exp(0)` round trips.
pub fn gram_matrix(data: &Dataset, length_scale: f64, noise: f64) -> Result<KernelSystem> {
    if !(length_scale > 0.0) || !length_scale.is_finite() {
        return Err(Error::InvalidParameter("length scale must be positive".into()));
    }
    if !(noise > 0.0) || !noise.is_finite() {
        return Err(Error::InvalidParameter("noise must be positive".into()));
    }
    let d = data.n_points();
    let inv = 1.0 / (2.0 * length_scale * length_scale);
    let mut gram = DenseMatrix::zeros(d, d);
    for i in 0..d {
        gram.set(i, i, 1.0);
        for j in i + 1..d {
            let v = (-data.squared_distance(i, j) * inv).exp();
            gram.set(i, j, v);
            gram.set(j, i, v);
        }
    }
    Ok(KernelSystem {
        gram,
        noise,
        length_scale,
    })
}
