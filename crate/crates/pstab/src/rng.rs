//! Seeded, splittable random streams and Gaussian sampling.
//!
//! All randomness in the crate flows through ChaCha streams keyed by a
//! caller-supplied 64-bit seed, so every estimate, selection and experiment
//! is reproducible and independent streams can be handed to parallel workers
//! without coordination. Normal variates come from a Box–Muller transform of
//! the stream's uniforms.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// A ChaCha generator positioned on stream `stream` of the cipher keyed by
/// `seed`. Distinct streams of the same seed never overlap.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives an independent child seed, used where a component needs a whole
/// seed of its own (per trial, per grid cell) rather than a stream.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 step on seed + (index+1)·golden-ratio increment
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]: keeps ln finite
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * core::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Fills `out` with i.i.d. standard normal draws.
pub fn fill_standard_normal<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let mut i = 0;
    while i + 1 < out.len() {
        let (a, b) = normal_pair(rng);
        out[i] = a;
        out[i + 1] = b;
        i += 2;
    }
    if i < out.len() {
        out[i] = normal_pair(rng).0;
    }
}

pub fn standard_normal_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    fill_standard_normal(rng, &mut out);
    out
}

/// A `d × k` matrix with i.i.d. `N(0, scale)` entries drawn column-major from
/// `rng`. Deterministic for a given generator state.
pub fn gaussian_matrix<R: Rng + ?Sized>(
    d: usize,
    k: usize,
    scale: f64,
    rng: &mut R,
) -> Result<DenseMatrix> {
    if d < 1 || k < 1 {
        return Err(Error::InvalidParameter(
            "gaussian matrix dimensions must be at least 1".into(),
        ));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidParameter("scale must be positive and finite".into()));
    }
    let mut m = DenseMatrix::zeros(d, k);
    let sd = scale.sqrt();
    for j in 0..k {
        let col = m.col_mut(j);
        fill_standard_normal(rng, col);
        for v in col {
            *v *= sd;
        }
    }
    Ok(m)
}
