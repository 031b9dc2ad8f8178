//! Cholesky factorization and SPD inversion.

use rayon::prelude::*;

use super::sym::{packed_len, SymMatrix};
use super::dot;
use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor `L` with `A = L * L^T`.
///
/// Only constructible through [`cholesky`], so every value has strictly
/// positive diagonal entries.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    /// Lower triangle of `L`, packed row-major like `SymMatrix`.
    lower: Vec<f64>,
}

/// Factor a symmetric matrix as `L * L^T`.
///
/// Fails with the 0-based pivot index at which a non-positive (or
/// non-finite) pivot appeared; callers decide whether to regularize and
/// retry.
pub fn cholesky(a: &SymMatrix) -> Result<CholeskyFactor> {
    cholesky_stage(a, "cholesky")
}

pub(crate) fn cholesky_stage(a: &SymMatrix, stage: &'static str) -> Result<CholeskyFactor> {
    let p = a.dim();
    let src = a.lower();
    // Pivots at rounding level are rank deficiency, not positive
    // definiteness; the floor is relative to the largest diagonal entry.
    let scale = (0..p)
        .map(|i| src[i * (i + 1) / 2 + i].abs())
        .fold(0.0f64, f64::max);
    let floor = p as f64 * f64::EPSILON * scale;
    let mut l = vec![0.0f64; packed_len(p)];
    for i in 0..p {
        let row_i = i * (i + 1) / 2;
        for j in 0..i {
            let row_j = j * (j + 1) / 2;
            let s = src[row_i + j] - dot(&l[row_i..row_i + j], &l[row_j..row_j + j]);
            l[row_i + j] = s / l[row_j + j];
        }
        let d = src[row_i + i] - dot(&l[row_i..row_i + i], &l[row_i..row_i + i]);
        // A NaN pivot fails this comparison too, so divergent inputs
        // surface as NotPositiveDefinite instead of propagating NaNs.
        if !(d > floor && d.is_finite()) {
            return Err(Error::NotPositiveDefinite { pivot_index: i, stage });
        }
        l[row_i + i] = d.sqrt();
    }
    Ok(CholeskyFactor { dim: p, lower: l })
}

impl CholeskyFactor {
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `L[i][j]` (zero above the diagonal).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.dim && j < self.dim, "index out of range");
        if j > i {
            0.0
        } else {
            self.lower[i * (i + 1) / 2 + j]
        }
    }

    /// `log det A = 2 * sum_i ln L_ii`.
    pub fn log_det(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.lower[i * (i + 1) / 2 + i].ln())
            .sum::<f64>()
            * 2.0
    }

    /// Reconstruct `L * L^T`; used by tests and the factor's own invariant.
    pub fn reconstruct(&self) -> SymMatrix {
        let p = self.dim;
        let mut out = vec![0.0f64; packed_len(p)];
        for i in 0..p {
            let row_i = i * (i + 1) / 2;
            for j in 0..=i {
                let row_j = j * (j + 1) / 2;
                out[row_i + j] = dot(&self.lower[row_i..row_i + j + 1], &self.lower[row_j..row_j + j + 1]);
            }
        }
        SymMatrix::from_lower(p, out)
    }

    /// `L * z` for a dense vector `z`; the GMRF sampler's core operation.
    pub fn mul_lower(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.dim, "vector length mismatch");
        (0..self.dim)
            .map(|i| {
                let row = i * (i + 1) / 2;
                dot(&self.lower[row..row + i + 1], &z[..i + 1])
            })
            .collect()
    }

    /// `A^{-1}` from the factor: invert `L` column by column, then form
    /// `L^{-T} L^{-1}`. Columns and output rows are independent, so both
    /// passes parallelize with bit-identical results at any thread count.
    pub fn inverse(&self) -> SymMatrix {
        let p = self.dim;
        let l = &self.lower;
        // Row j of `u` holds column j of L^{-1}, i.e. u[j][k] = (L^{-1})[k][j]
        // for k = j..p, stored contiguously.
        let mut u: Vec<Vec<f64>> = Vec::with_capacity(p);
        (0..p)
            .into_par_iter()
            .map(|j| {
                let mut x = vec![0.0f64; p - j];
                x[0] = 1.0 / l[j * (j + 1) / 2 + j];
                for i in j + 1..p {
                    let row_i = i * (i + 1) / 2;
                    let s = dot(&l[row_i + j..row_i + i], &x[..i - j]);
                    x[i - j] = -s / l[row_i + i];
                }
                x
            })
            .collect_into_vec(&mut u);

        let rows: Vec<Vec<f64>> = (0..p)
            .into_par_iter()
            .map(|i| {
                let tail = p - i;
                let ui = &u[i];
                (0..=i)
                    .map(|j| dot(&ui[..tail], &u[j][i - j..i - j + tail]))
                    .collect()
            })
            .collect();

        let mut lower = Vec::with_capacity(packed_len(p));
        for row in rows {
            lower.extend_from_slice(&row);
        }
        SymMatrix::from_lower(p, lower)
    }
}

/// Log-determinant of an SPD matrix through its factor.
pub fn log_det(factor: &CholeskyFactor) -> f64 {
    factor.log_det()
}

/// Invert an SPD matrix via Cholesky.
///
/// The result is re-symmetrized as `(X + X^T) / 2` by construction of the
/// factor product, absorbing rounding drift before downstream
/// positive-definiteness checks.
pub fn spd_inverse(a: &SymMatrix) -> Result<SymMatrix> {
    Ok(cholesky_stage(a, "spd_inverse")?.inverse())
}
