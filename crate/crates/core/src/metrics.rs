//! Support-recovery metrics and empirical checks of the convergence
//! assumptions.
//!
//! All counts run over unordered off-diagonal pairs `i < j` only: the
//! diagonal of a positive definite estimate is always nonzero and would
//! inflate the true positive rate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{frob_inner, spd_inverse, SymMatrix};

/// Confusion counts and rates over off-diagonal pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportMetrics {
    pub tpr: f64,
    pub fpr: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

/// Per-iteration proxies for the three learning-rate inequalities the
/// convergence analysis assumes. Consumers compare the ratios against
/// candidate squared learning-rate values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub k: usize,
    /// `<Theta_k, Theta*> / ||Theta_k||_F^2`.
    pub ratio1: f64,
    /// `<Theta_k S Theta_k, Theta*> / ||Theta_k||_F^2`.
    pub ratio2: f64,
    /// `||S - (Theta*)^{-1}||_F^2 / ||Theta_k - Theta*||_F^2`; infinite
    /// sentinel when the iterate equals the target.
    pub ratio3: f64,
}

/// Compare an estimate's off-diagonal support against the true support.
///
/// An entry counts as nonzero iff `|value| > zero_tol`; the default
/// `zero_tol = 0` is exact, matching the exact zeros both solvers produce.
/// Rates with an empty denominator are reported as 0.
pub fn support_metrics(
    theta_hat: &SymMatrix,
    support_true: &[(usize, usize)],
    zero_tol: f64,
) -> Result<SupportMetrics> {
    let p = theta_hat.dim();
    let mut truth = std::collections::HashSet::with_capacity(support_true.len());
    for &(i, j) in support_true {
        if i >= p || j >= p {
            return Err(Error::DimensionMismatch { expected: p, found: i.max(j) + 1 });
        }
        if i == j {
            return Err(Error::InvalidConfig(format!(
                "support contains diagonal pair ({i}, {j})"
            )));
        }
        truth.insert((i.min(j), i.max(j)));
    }

    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..p {
        for j in i + 1..p {
            let predicted = theta_hat.get(i, j).abs() > zero_tol;
            let actual = truth.contains(&(i, j));
            match (predicted, actual) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, false) => tn += 1,
                (false, true) => fn_ += 1,
            }
        }
    }
    let rate = |num: usize, den: usize| if den > 0 { num as f64 / den as f64 } else { 0.0 };
    Ok(SupportMetrics {
        tpr: rate(tp, tp + fn_),
        fpr: rate(fp, fp + tn),
        tp,
        fp,
        tn,
        fn_,
    })
}

/// Frobenius distance `||Theta_hat - Theta*||_F`.
pub fn frob_error(theta_hat: &SymMatrix, theta_star: &SymMatrix) -> Result<f64> {
    let diff = theta_hat.zip_with(theta_star, |a, b| a - b)?;
    Ok(frob_inner(&diff, &diff)?.sqrt())
}

/// Evaluate the three assumption ratios at iterate `theta_k`.
pub fn assumption_diagnostics(
    k: usize,
    theta_k: &SymMatrix,
    theta_star: &SymMatrix,
    s: &SymMatrix,
) -> Result<AssumptionReport> {
    let norm_sq = frob_inner(theta_k, theta_k)?;
    let ratio1 = frob_inner(theta_k, theta_star)? / norm_sq;
    let sandwich = theta_k.sandwich(s)?;
    let ratio2 = frob_inner(&sandwich, theta_star)? / norm_sq;

    let star_inv = spd_inverse(theta_star)?;
    let resid = s.zip_with(&star_inv, |a, b| a - b)?;
    let num = frob_inner(&resid, &resid)?;
    let diff = theta_k.zip_with(theta_star, |a, b| a - b)?;
    let den = frob_inner(&diff, &diff)?;
    let ratio3 = if den == 0.0 { f64::INFINITY } else { num / den };

    Ok(AssumptionReport { k, ratio1, ratio2, ratio3 })
}
