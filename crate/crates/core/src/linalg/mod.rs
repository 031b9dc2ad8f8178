//! Dense symmetric-matrix kernels: storage, Cholesky factorization, SPD
//! inversion, and the entrywise thresholding operators.
//!
//! Matrices are stored as one packed triangle, so symmetry is structural
//! rather than a runtime promise. Everything here is a pure function of its
//! inputs; values are immutable after construction and safe to share across
//! threads.

mod factor;
mod sym;
mod threshold;

pub use factor::{cholesky, log_det, spd_inverse, CholeskyFactor};
pub use sym::{frob_inner, SymMatrix};
pub use threshold::{hard_threshold, soft_threshold};

/// Dot product with four independent accumulators. The fixed accumulation
/// order keeps results bit-reproducible while letting the compiler use
/// vector registers.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = c * 4;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in chunks * 4..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
