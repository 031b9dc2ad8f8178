//! Packed dense symmetric matrix.

use crate::error::{Error, Result};

/// Dense symmetric `p x p` matrix storing the lower triangle row by row.
///
/// `entry(i, j) == entry(j, i)` holds by construction: only one copy of each
/// off-diagonal pair exists. Constructors symmetrize their input as
/// `(A + A^T) / 2` and reject non-finite entries, so every value of this type
/// is a finite symmetric matrix with `dim >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    /// Lower triangle, row-major: row `i` occupies
    /// `i*(i+1)/2 .. i*(i+1)/2 + i + 1`.
    lower: Vec<f64>,
}

#[inline]
pub(crate) fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    debug_assert!(j <= i);
    i * (i + 1) / 2 + j
}

impl SymMatrix {
    /// Zero matrix. Panics if `dim == 0`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "SymMatrix dimension must be at least 1");
        SymMatrix { dim, lower: vec![0.0; packed_len(dim)] }
    }

    /// Identity matrix. Panics if `dim == 0`.
    pub fn identity(dim: usize) -> Self {
        let mut m = SymMatrix::zeros(dim);
        for i in 0..dim {
            m.lower[packed_index(i, i)] = 1.0;
        }
        m
    }

    /// Diagonal matrix from the given entries. Panics on an empty slice,
    /// returns an error on non-finite entries.
    pub fn diag(entries: &[f64]) -> Result<Self> {
        let mut m = SymMatrix::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NotFinite { row: i, col: i });
            }
            m.lower[packed_index(i, i)] = v;
        }
        Ok(m)
    }

    /// Build from a full row-major `dim x dim` buffer. The input is
    /// symmetrized as `(A + A^T) / 2`; non-finite entries are rejected.
    pub fn from_dense(dim: usize, data: &[f64]) -> Result<Self> {
        assert!(dim >= 1, "SymMatrix dimension must be at least 1");
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        let mut lower = vec![0.0; packed_len(dim)];
        for i in 0..dim {
            for j in 0..=i {
                let a = data[i * dim + j];
                let b = data[j * dim + i];
                if !a.is_finite() {
                    return Err(Error::NotFinite { row: i, col: j });
                }
                if !b.is_finite() {
                    return Err(Error::NotFinite { row: j, col: i });
                }
                lower[packed_index(i, j)] = 0.5 * (a + b);
            }
        }
        Ok(SymMatrix { dim, lower })
    }

    /// Build from row slices; a convenience wrapper over [`from_dense`].
    ///
    /// [`from_dense`]: SymMatrix::from_dense
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        assert!(dim >= 1, "SymMatrix dimension must be at least 1");
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        SymMatrix::from_dense(dim, &data)
    }

    /// Matrix dimension `p`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)`; symmetric access, panics out of range.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.dim && j < self.dim, "index out of range");
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        self.lower[packed_index(hi, lo)]
    }

    /// Set entry `(i, j)` and its mirror.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, value: f64) {
        assert!(i < self.dim && j < self.dim, "index out of range");
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        self.lower[packed_index(hi, lo)] = value;
    }

    /// Packed lower triangle, row-major.
    #[inline]
    pub(crate) fn lower(&self) -> &[f64] {
        &self.lower
    }

    #[inline]
    pub(crate) fn lower_mut(&mut self) -> &mut [f64] {
        &mut self.lower
    }

    pub(crate) fn from_lower(dim: usize, lower: Vec<f64>) -> Self {
        debug_assert_eq!(lower.len(), packed_len(dim));
        SymMatrix { dim, lower }
    }

    /// Visit stored entries as `(i, j, value)` with `i >= j`.
    pub fn stored_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            (0..=i).map(move |j| (i, j, self.lower[packed_index(i, j)]))
        })
    }

    /// Entrywise combination of two matrices of equal dimension.
    pub(crate) fn zip_with(&self, other: &SymMatrix, f: impl Fn(f64, f64) -> f64) -> Result<SymMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let lower = self
            .lower
            .iter()
            .zip(other.lower.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(SymMatrix { dim: self.dim, lower })
    }

    /// `self + c * I`.
    pub fn add_diag(&self, c: f64) -> SymMatrix {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.lower[packed_index(i, i)] += c;
        }
        out
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.lower[packed_index(i, i)]).sum()
    }

    /// Frobenius norm over the full (logical) matrix.
    pub fn frob_norm(&self) -> f64 {
        frob_inner(self, self).expect("same matrix").sqrt()
    }

    /// Entrywise l1 norm of the full matrix, diagonal included.
    pub fn abs_sum(&self) -> f64 {
        let mut total = 0.0;
        for (i, j, v) in self.stored_entries() {
            total += if i == j { v.abs() } else { 2.0 * v.abs() };
        }
        total
    }

    /// Largest absolute off-diagonal entry; 0 for a 1x1 matrix.
    pub fn max_offdiag_abs(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, j, v) in self.stored_entries() {
            if i != j {
                best = best.max(v.abs());
            }
        }
        best
    }

    /// Number of nonzero off-diagonal entries counted as unordered pairs
    /// `i < j`. An entry is nonzero iff `|v| > zero_tol`.
    pub fn nnz_offdiag(&self, zero_tol: f64) -> usize {
        self.stored_entries()
            .filter(|&(i, j, v)| i != j && v.abs() > zero_tol)
            .count()
    }

    /// Off-diagonal support as unordered pairs `(i, j)` with `i < j`,
    /// using exact-zero semantics.
    pub fn offdiag_support(&self) -> Vec<(usize, usize)> {
        self.stored_entries()
            .filter(|&(i, j, v)| i != j && v != 0.0)
            .map(|(i, j, _)| (j, i))
            .collect()
    }

    /// Expand to a full row-major `dim * dim` buffer.
    pub fn to_dense(&self) -> Vec<f64> {
        let p = self.dim;
        let mut out = vec![0.0; p * p];
        for (i, j, v) in self.stored_entries() {
            out[i * p + j] = v;
            out[j * p + i] = v;
        }
        out
    }

    /// Largest absolute entrywise difference against `other`.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.lower
            .iter()
            .zip(other.lower.iter())
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0f64, f64::max)
    }

    /// Simultaneous row/column permutation `P A P^T`, where `perm[k]` is the
    /// source index moved to position `k`.
    pub fn permuted(&self, perm: &[usize]) -> SymMatrix {
        assert_eq!(perm.len(), self.dim, "permutation length mismatch");
        let mut out = SymMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..=i {
                out.lower[packed_index(i, j)] = self.get(perm[i], perm[j]);
            }
        }
        out
    }

    /// The symmetric sandwich product `self * s * self`.
    ///
    /// Used by the assumption diagnostics; quadratic intermediate storage.
    pub fn sandwich(&self, s: &SymMatrix) -> Result<SymMatrix> {
        if self.dim != s.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: s.dim });
        }
        let p = self.dim;
        let a = self.to_dense();
        let b = s.to_dense();
        // t = a * b
        let mut t = vec![0.0; p * p];
        for i in 0..p {
            for m in 0..p {
                let aim = a[i * p + m];
                if aim == 0.0 {
                    continue;
                }
                let brow = &b[m * p..(m + 1) * p];
                let trow = &mut t[i * p..(i + 1) * p];
                for l in 0..p {
                    trow[l] += aim * brow[l];
                }
            }
        }
        // r = t * a, lower triangle only; symmetric analytically, and
        // from_dense re-symmetrizes the rounding residue away.
        let mut r = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                r[i * p + j] = super::dot(&t[i * p..(i + 1) * p], &a[j * p..(j + 1) * p]);
            }
        }
        SymMatrix::from_dense(p, &r)
    }
}

/// Frobenius inner product `sum_ij a_ij * b_ij`; equals `tr(A B)` for
/// symmetric operands and `||A||_F^2` when `a == b`.
pub fn frob_inner(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    let mut diag = 0.0;
    let mut off = 0.0;
    for i in 0..a.dim {
        let base = packed_index(i, 0);
        for j in 0..i {
            off += a.lower[base + j] * b.lower[base + j];
        }
        diag += a.lower[base + i] * b.lower[base + i];
    }
    Ok(diag + 2.0 * off)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes() {
        let m = SymMatrix::from_dense(2, &[1.0, 0.75, 0.25, 1.0]).unwrap();
        assert_eq!(m.get(0, 1), 0.5);
        assert_eq!(m.get(1, 0), 0.5);
    }

    #[test]
    fn rejects_non_finite() {
        let err = SymMatrix::from_dense(2, &[1.0, f64::NAN, 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotFinite { .. }));
        assert!(SymMatrix::diag(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn frob_inner_identity() {
        let i3 = SymMatrix::identity(3);
        assert_eq!(frob_inner(&i3, &i3).unwrap(), 3.0);
    }

    #[test]
    fn frob_inner_zero() {
        let a = SymMatrix::from_rows(&[&[2.0, -1.0], &[-1.0, 3.0]]).unwrap();
        let z = SymMatrix::zeros(2);
        assert_eq!(frob_inner(&a, &z).unwrap(), 0.0);
    }

    #[test]
    fn frob_inner_chain3() {
        // Entrywise sum over the chain matrix: 3 diagonal entries of 1.25
        // and 4 off-diagonal entries of -0.5.
        let c = crate::synthetic::chain_precision(3);
        let expected = 3.0 * 1.25 * 1.25 + 4.0 * 0.5 * 0.5;
        assert_eq!(frob_inner(&c, &c).unwrap(), expected);
        assert_eq!(expected, 5.6875);
    }

    #[test]
    fn frob_inner_dimension_mismatch() {
        let a = SymMatrix::identity(2);
        let b = SymMatrix::identity(3);
        assert!(matches!(
            frob_inner(&a, &b),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn permutation_roundtrip() {
        let a = SymMatrix::from_rows(&[
            &[4.0, 1.0, 0.5],
            &[1.0, 3.0, -0.2],
            &[0.5, -0.2, 2.0],
        ])
        .unwrap();
        let perm = [2usize, 0, 1];
        let p = a.permuted(&perm);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p.get(i, j), a.get(perm[i], perm[j]));
            }
        }
    }

    #[test]
    fn sandwich_diagonal_case() {
        // (2I) S (2I) = 4 S
        let two_i = SymMatrix::diag(&[2.0, 2.0]).unwrap();
        let s = SymMatrix::from_rows(&[&[1.0, 0.5], &[0.5, 2.0]]).unwrap();
        let r = two_i.sandwich(&s).unwrap();
        assert!(r.max_abs_diff(&s.zip_with(&s, |a, _| 4.0 * a).unwrap()) < 1e-12);
    }

    #[test]
    fn nnz_and_support() {
        let m = SymMatrix::from_rows(&[
            &[1.0, 0.0, 0.3],
            &[0.0, 1.0, 0.0],
            &[0.3, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(m.nnz_offdiag(0.0), 1);
        assert_eq!(m.offdiag_support(), vec![(0, 2)]);
    }
}
