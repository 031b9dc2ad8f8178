//! Entrywise hard and soft thresholding.

use super::sym::SymMatrix;

/// Zero every entry with `|a_ij| < thr`; entries at or above the level pass
/// through unchanged. The strict inequality means entries exactly equal to
/// `thr` survive. With `skip_diagonal`, diagonal entries are never zeroed.
pub fn hard_threshold(a: &SymMatrix, thr: f64, skip_diagonal: bool) -> SymMatrix {
    debug_assert!(thr > 0.0, "threshold level must be positive");
    apply(a, |v, on_diag| {
        if (!on_diag || !skip_diagonal) && v.abs() < thr {
            0.0
        } else {
            v
        }
    })
}

/// Entrywise shrinkage `sign(a_ij) * max(|a_ij| - t, 0)`, diagonal exempt
/// when flagged.
pub fn soft_threshold(a: &SymMatrix, t: f64, skip_diagonal: bool) -> SymMatrix {
    debug_assert!(t > 0.0, "threshold level must be positive");
    apply(a, |v, on_diag| {
        if on_diag && skip_diagonal {
            v
        } else {
            v.signum() * (v.abs() - t).max(0.0)
        }
    })
}

fn apply(a: &SymMatrix, f: impl Fn(f64, bool) -> f64) -> SymMatrix {
    let mut out = a.clone();
    let p = out.dim();
    let lower = out.lower_mut();
    for i in 0..p {
        let row = i * (i + 1) / 2;
        for j in 0..=i {
            lower[row + j] = f(lower[row + j], i == j);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_zeroes_small_entries() {
        let a = SymMatrix::from_rows(&[&[1.0, 0.05], &[0.05, 1.0]]).unwrap();
        let t = hard_threshold(&a, 0.1, true);
        assert_eq!(t.get(0, 1), 0.0);
        assert_eq!(t.get(0, 0), 1.0);
    }

    #[test]
    fn hard_below_min_entry_is_identity() {
        let a = SymMatrix::from_rows(&[&[0.9, -0.4], &[-0.4, 1.1]]).unwrap();
        let t = hard_threshold(&a, 0.3, false);
        assert_eq!(t, a);
    }

    #[test]
    fn hard_diagonal_exemption() {
        let a = SymMatrix::from_rows(&[&[0.2, -0.15], &[-0.15, 0.09]]).unwrap();
        let kept = hard_threshold(&a, 0.1, true);
        assert_eq!(kept, a);
        let zeroed = hard_threshold(&a, 0.1, false);
        assert_eq!(zeroed.get(1, 1), 0.0);
        assert_eq!(zeroed.get(0, 0), 0.2);
        assert_eq!(zeroed.get(0, 1), -0.15);
    }

    #[test]
    fn hard_keeps_entries_equal_to_level() {
        let a = SymMatrix::from_rows(&[&[1.0, 0.1], &[0.1, 1.0]]).unwrap();
        let t = hard_threshold(&a, 0.1, true);
        assert_eq!(t.get(0, 1), 0.1);
    }

    #[test]
    fn soft_shrinks_offdiagonal() {
        let a = SymMatrix::from_rows(&[&[1.0, 0.3], &[0.3, 1.0]]).unwrap();
        let t = soft_threshold(&a, 0.1, true);
        assert!((t.get(0, 1) - 0.2).abs() < 1e-15);
        assert_eq!(t.get(0, 0), 1.0);
    }

    #[test]
    fn soft_tiny_level_is_near_identity() {
        let a = SymMatrix::from_rows(&[&[0.7, -0.2], &[-0.2, 0.9]]).unwrap();
        let t = soft_threshold(&a, 1e-300, false);
        assert!(t.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn soft_sign_handling() {
        let a = SymMatrix::from_rows(&[&[-0.5]]).unwrap();
        let t = soft_threshold(&a, 0.2, false);
        assert!((t.get(0, 0) + 0.3).abs() < 1e-15);
    }
}
