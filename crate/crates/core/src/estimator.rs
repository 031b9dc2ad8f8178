//! The transform-domain estimator with exponentially decaying adaptive
//! hard thresholding.
//!
//! Each iteration applies the gradient-residual correction to the inverse
//! of the current iterate (the covariance domain), reverts to the precision
//! domain through a Tikhonov-regularized inversion, and hard-thresholds the
//! result at a level that decays geometrically across iterations:
//!
//! ```text
//! mu_k    = thr_k / lambda
//! M_k     = Theta_k^{-1} + mu_k (S - Theta_k^{-1})
//! Theta'  = (M_k + rho_k I)^{-1}
//! Theta_{k+1} = hard_threshold(Theta', thr_k)
//! thr_{k+1}   = thr_k * d
//! ```

use serde::Serialize;

use crate::defaults;
use crate::error::{Error, Result};
use crate::linalg::{
    cholesky, frob_inner, hard_threshold, spd_inverse, CholeskyFactor, SymMatrix,
};

/// All scalar knobs of the estimator. Defaults live in [`crate::defaults`];
/// `thr0` is data-dependent (a fraction of the largest off-diagonal entry
/// of the input), so use [`EstimatorConfig::defaults_for`] when the input
/// matrix is at hand.
#[derive(Debug, Clone, Serialize)]
pub struct EstimatorConfig {
    /// l1 weight; couples the step size to the threshold as
    /// `mu_k = thr_k / lambda`.
    pub lambda: f64,
    /// Initial hard-threshold level.
    pub thr0: f64,
    /// Per-iteration threshold decay factor, in (0, 1).
    pub decay: f64,
    /// Initial Tikhonov constant added before the precision-domain
    /// inversion.
    pub rho0: f64,
    /// Per-iteration multiplier on the Tikhonov constant (1 = constant).
    pub rho_growth: f64,
    /// Iteration cap.
    pub max_iters: usize,
    /// Early stop when the relative iterate change drops below this;
    /// 0 disables early stopping.
    pub rel_tol: f64,
    /// Exempt the diagonal from hard thresholding.
    pub skip_diagonal: bool,
    /// Scale of the diagonal jitter used to rescue a failed inversion.
    pub jitter_base: f64,
}

impl EstimatorConfig {
    /// Shipped defaults with an explicit initial threshold.
    pub fn with_thr0(thr0: f64) -> Self {
        EstimatorConfig {
            lambda: defaults::LAMBDA,
            thr0,
            decay: defaults::DECAY,
            rho0: defaults::RHO0,
            rho_growth: defaults::RHO_GROWTH,
            max_iters: defaults::MAX_ITERS,
            rel_tol: defaults::REL_TOL,
            skip_diagonal: defaults::SKIP_DIAGONAL,
            jitter_base: defaults::JITTER_BASE,
        }
    }

    /// Shipped defaults with the initial threshold derived from the data:
    /// half the largest absolute off-diagonal entry of `s_hat` (with a
    /// fixed fallback when there is none).
    pub fn defaults_for(s_hat: &SymMatrix) -> Self {
        Self::with_thr0(default_thr0(s_hat))
    }

    /// Check the documented ranges of every field.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return fail(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.thr0 > 0.0 && self.thr0.is_finite()) {
            return fail(format!("thr0 must be positive, got {}", self.thr0));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return fail(format!("decay must lie in (0, 1), got {}", self.decay));
        }
        if !(self.rho0 >= 0.0 && self.rho0.is_finite()) {
            return fail(format!("rho0 must be nonnegative, got {}", self.rho0));
        }
        if !(self.rho_growth >= 0.0 && self.rho_growth.is_finite()) {
            return fail(format!("rho_growth must be nonnegative, got {}", self.rho_growth));
        }
        if self.max_iters == 0 {
            return fail("max_iters must be at least 1".to_string());
        }
        if !(self.rel_tol >= 0.0) {
            return fail(format!("rel_tol must be nonnegative, got {}", self.rel_tol));
        }
        if !(self.jitter_base > 0.0) {
            return fail(format!("jitter_base must be positive, got {}", self.jitter_base));
        }
        Ok(())
    }
}

/// Data-driven default initial threshold.
pub fn default_thr0(s_hat: &SymMatrix) -> f64 {
    let max_off = s_hat.max_offdiag_abs();
    if max_off > 0.0 {
        defaults::THR0_FRACTION * max_off
    } else {
        defaults::THR0_FALLBACK
    }
}

/// One row of the iteration trace. The schedule values are the ones the
/// step used; `objective`, `nnz_offdiag`, and `delta_rel` describe the
/// iterate it produced.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    pub thr_k: f64,
    pub mu_k: f64,
    /// Tikhonov constant actually used, after any rescue escalation.
    pub rho_k: f64,
    /// Objective value of the produced iterate; `-inf` when the iterate
    /// left the positive definite cone.
    pub objective: f64,
    /// Nonzero off-diagonal entries, counted as unordered pairs.
    pub nnz_offdiag: usize,
    /// `||Theta_k - Theta_{k-1}||_F / ||Theta_{k-1}||_F`.
    pub delta_rel: f64,
}

/// How a solver run ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveStatus {
    /// The relative iterate change fell below `rel_tol`.
    Converged,
    /// The iteration cap was reached.
    MaxIters,
    /// A step failed; the message names the failing stage.
    Failed(String),
}

impl SolveStatus {
    pub fn is_failure(&self) -> bool {
        matches!(self, SolveStatus::Failed(_))
    }

    pub fn label(&self) -> String {
        match self {
            SolveStatus::Converged => "converged".to_string(),
            SolveStatus::MaxIters => "max-iters".to_string(),
            SolveStatus::Failed(reason) => format!("failed: {reason}"),
        }
    }
}

/// Final estimate plus the per-iteration trace.
#[derive(Debug, Clone)]
pub struct EstimationResult {
    pub theta_hat: SymMatrix,
    pub trace: Vec<IterationRecord>,
    pub status: SolveStatus,
    pub iters_run: usize,
}

impl EstimationResult {
    /// Objective of the final iterate from the trace, `-inf` if the trace
    /// is empty.
    pub fn final_objective(&self) -> f64 {
        self.trace.last().map_or(f64::NEG_INFINITY, |r| r.objective)
    }
}

/// Initial iterate `(S + rho0 I)^{-1}`.
///
/// The update rule never defines a starting point; this choice is positive
/// definite for any `rho0 > 0` even when the empirical covariance is
/// rank-deficient, and already lives in the precision domain.
pub fn init_theta(s_hat: &SymMatrix, rho0: f64) -> Result<SymMatrix> {
    spd_inverse(&s_hat.add_diag(rho0))
}

/// One full update at threshold level `thr_k` and Tikhonov constant
/// `rho_k`.
///
/// Inversion failures are retried: the iterate inversion once with a
/// trace-scaled diagonal jitter, the Tikhonov inversion by escalating
/// `rho_k` tenfold up to three times. A step that still fails reports which
/// inversion broke down.
pub fn sice_edat_step(
    theta_k: &SymMatrix,
    s_hat: &SymMatrix,
    thr_k: f64,
    cfg: &EstimatorConfig,
    rho_k: f64,
) -> Result<SymMatrix> {
    let mu_k = thr_k / cfg.lambda;
    Ok(step_inner(theta_k, None, s_hat, thr_k, mu_k, rho_k, cfg)?.theta)
}

struct StepOutcome {
    theta: SymMatrix,
    rho_used: f64,
    /// Cholesky factor of the produced iterate, when it is PD; reused by
    /// the driver for the objective and the next step's inversion.
    factor: Option<CholeskyFactor>,
    objective: f64,
}

fn step_inner(
    theta_k: &SymMatrix,
    theta_factor: Option<&CholeskyFactor>,
    s_hat: &SymMatrix,
    thr_k: f64,
    mu_k: f64,
    rho_k: f64,
    cfg: &EstimatorConfig,
) -> Result<StepOutcome> {
    if theta_k.dim() != s_hat.dim() {
        return Err(Error::DimensionMismatch { expected: s_hat.dim(), found: theta_k.dim() });
    }

    let theta_inv = match theta_factor {
        Some(f) => f.inverse(),
        None => match cholesky(theta_k) {
            Ok(f) => f.inverse(),
            Err(_) => {
                // One jitter retry with a trace-scaled shift.
                let eps = cfg.jitter_base * theta_k.trace() / theta_k.dim() as f64;
                match cholesky(&theta_k.add_diag(eps)) {
                    Ok(f) => f.inverse(),
                    Err(Error::NotPositiveDefinite { pivot_index, .. }) => {
                        return Err(Error::NotPositiveDefinite {
                            pivot_index,
                            stage: "iterate inversion",
                        })
                    }
                    Err(e) => return Err(e),
                }
            }
        },
    };

    // Transform-domain update: correct the covariance-domain iterate by the
    // residual toward the empirical covariance.
    let m = theta_inv.zip_with(s_hat, |t, s| t + mu_k * (s - t))?;

    // Revert to the precision domain; rho escalates tenfold on failure.
    let mut rho = rho_k;
    let mut last_pivot = 0;
    let mut inverted = None;
    for attempt in 0..4 {
        match cholesky(&m.add_diag(rho)) {
            Ok(f) => {
                inverted = Some(f.inverse());
                break;
            }
            Err(Error::NotPositiveDefinite { pivot_index, .. }) => {
                last_pivot = pivot_index;
                if attempt == 3 {
                    break;
                }
                if rho > 0.0 {
                    rho *= 10.0;
                } else {
                    // A zero rho cannot escalate multiplicatively; seed the
                    // retry from the jitter scale instead.
                    rho = cfg.jitter_base * m.trace().abs().max(1.0) / m.dim() as f64;
                }
            }
            Err(e) => return Err(e),
        }
    }
    let Some(theta_next) = inverted else {
        return Err(Error::NotPositiveDefinite {
            pivot_index: last_pivot,
            stage: "tikhonov inversion",
        });
    };

    let theta = hard_threshold(&theta_next, thr_k, cfg.skip_diagonal);
    let (factor, objective) = match cholesky(&theta) {
        Ok(f) => {
            let obj = objective_from_factor(&f, &theta, s_hat, cfg.lambda)?;
            (Some(f), obj)
        }
        // Outside the PD cone the objective is -inf; the next step will
        // jitter its way back or fail.
        Err(_) => (None, f64::NEG_INFINITY),
    };
    Ok(StepOutcome { theta, rho_used: rho, factor, objective })
}

/// The regularized log-det objective
/// `f(Theta) = log det Theta - tr(S Theta) - lambda ||Theta||_1`,
/// with the l1 term including the diagonal.
///
/// Outside the positive definite cone the objective is `-inf`; that case is
/// reported as an error rather than a value.
pub fn objective_value(theta: &SymMatrix, s: &SymMatrix, lambda: f64) -> Result<f64> {
    if theta.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: theta.dim() });
    }
    let factor = cholesky(theta)?;
    objective_from_factor(&factor, theta, s, lambda)
}

fn objective_from_factor(
    factor: &CholeskyFactor,
    theta: &SymMatrix,
    s: &SymMatrix,
    lambda: f64,
) -> Result<f64> {
    Ok(factor.log_det() - frob_inner(s, theta)? - lambda * theta.abs_sum())
}

/// Run the full estimator: iterate [`sice_edat_step`] under the geometric
/// threshold schedule, recording one [`IterationRecord`] per iteration.
///
/// Stops early with [`SolveStatus::Converged`] when `rel_tol > 0` and the
/// relative iterate change drops below it; otherwise runs exactly
/// `max_iters` iterations. A failing step preserves the trace up to the
/// failure and reports the reason in [`SolveStatus::Failed`].
pub fn run_sice_edat(s_hat: &SymMatrix, cfg: &EstimatorConfig) -> EstimationResult {
    let p = s_hat.dim();
    if let Err(e) = cfg.validate() {
        return EstimationResult {
            theta_hat: SymMatrix::zeros(p),
            trace: Vec::new(),
            status: SolveStatus::Failed(e.to_string()),
            iters_run: 0,
        };
    }
    let mut theta = match init_theta(s_hat, cfg.rho0) {
        Ok(t) => t,
        Err(e) => {
            return EstimationResult {
                theta_hat: SymMatrix::zeros(p),
                trace: Vec::new(),
                status: SolveStatus::Failed(format!("initialization: {e}")),
                iters_run: 0,
            }
        }
    };

    let mut trace = Vec::with_capacity(cfg.max_iters);
    let mut status = SolveStatus::MaxIters;
    let mut thr = cfg.thr0;
    let mut rho = cfg.rho0;
    let mut carried_factor: Option<CholeskyFactor> = None;

    for k in 0..cfg.max_iters {
        let mu = thr / cfg.lambda;
        let outcome = match step_inner(&theta, carried_factor.as_ref(), s_hat, thr, mu, rho, cfg) {
            Ok(o) => o,
            Err(e) => {
                status = SolveStatus::Failed(e.to_string());
                break;
            }
        };

        let diff = outcome.theta.zip_with(&theta, |a, b| a - b).expect("same dims");
        let delta_rel = frob_inner(&diff, &diff).expect("same dims").sqrt() / theta.frob_norm();

        trace.push(IterationRecord {
            k,
            thr_k: thr,
            mu_k: mu,
            rho_k: outcome.rho_used,
            objective: outcome.objective,
            nnz_offdiag: outcome.theta.nnz_offdiag(0.0),
            delta_rel,
        });

        theta = outcome.theta;
        carried_factor = outcome.factor;

        if cfg.rel_tol > 0.0 && delta_rel < cfg.rel_tol {
            status = SolveStatus::Converged;
            break;
        }
        thr *= cfg.decay;
        rho *= cfg.rho_growth;
    }

    let iters_run = trace.len();
    EstimationResult { theta_hat: theta, trace, status, iters_run }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults;
    use crate::metrics::support_metrics;
    use crate::synthetic::{chain_precision, make_problem, ProblemKind, RngSpec};

    fn scalar(v: f64) -> SymMatrix {
        SymMatrix::from_rows(&[&[v]]).unwrap()
    }

    #[test]
    fn init_identity() {
        let t = init_theta(&SymMatrix::identity(3), 0.0).unwrap();
        assert!(t.max_abs_diff(&SymMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn init_zero_with_rho() {
        let t = init_theta(&SymMatrix::zeros(2), 0.5).unwrap();
        assert!(t.max_abs_diff(&SymMatrix::diag(&[2.0, 2.0]).unwrap()) < 1e-14);
    }

    #[test]
    fn init_rank_one_plus_ridge() {
        // S = vv^T with v = (1, 1); S + I = [[2,1],[1,2]], whose inverse is
        // (1/3) [[2,-1],[-1,2]] by the 2x2 formula.
        let s = SymMatrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        let t = init_theta(&s, 1.0).unwrap();
        let expected = SymMatrix::from_rows(&[
            &[2.0 / 3.0, -1.0 / 3.0],
            &[-1.0 / 3.0, 2.0 / 3.0],
        ])
        .unwrap();
        assert!(t.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn init_propagates_not_pd() {
        let s = SymMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!(init_theta(&s, 0.0).is_err());
    }

    #[test]
    fn step_scalar_arithmetic() {
        // theta = 2, s = 1, thr = 0.1, lambda = 1 (mu = 0.1), rho = 0:
        // M = 0.5 + 0.1 (1 - 0.5) = 0.55, so the step returns 1/0.55.
        let cfg = EstimatorConfig { lambda: 1.0, ..EstimatorConfig::with_thr0(0.1) };
        let out = sice_edat_step(&scalar(2.0), &scalar(1.0), 0.1, &cfg, 0.0).unwrap();
        assert!((out.get(0, 0) - 1.0 / 0.55).abs() < 1e-12);
    }

    #[test]
    fn step_scalar_tikhonov_shrinks() {
        // Same update with rho = 0.1 divides by 0.65 instead: the Tikhonov
        // term shrinks the eigenvalues.
        let cfg = EstimatorConfig { lambda: 1.0, ..EstimatorConfig::with_thr0(0.1) };
        let out = sice_edat_step(&scalar(2.0), &scalar(1.0), 0.1, &cfg, 0.1).unwrap();
        assert!((out.get(0, 0) - 1.0 / 0.65).abs() < 1e-12);
    }

    #[test]
    fn step_zero_residual_is_threshold_only() {
        // With S equal to the iterate's inverse the residual vanishes
        // bitwise, so the step reduces to re-inverting the inverse; below
        // the smallest entry magnitude the threshold changes nothing.
        let theta = chain_precision(4);
        let s = spd_inverse(&theta).unwrap();
        let cfg = EstimatorConfig { lambda: 1.0, ..EstimatorConfig::with_thr0(0.1) };
        let out = sice_edat_step(&theta, &s, 0.1, &cfg, 0.0).unwrap();
        assert!(out.max_abs_diff(&theta) < 1e-10);
    }

    #[test]
    fn objective_identity_case() {
        for p in [1usize, 4, 9] {
            let i = SymMatrix::identity(p);
            let lambda = 0.3;
            let expected = 0.0 - p as f64 - lambda * p as f64;
            assert!((objective_value(&i, &i, lambda).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn objective_scalar_case() {
        let v = objective_value(&scalar(2.0), &scalar(1.0), 1.0).unwrap();
        assert!((v - (2.0f64.ln() - 2.0 - 2.0)).abs() < 1e-12);
        assert!((v + 3.3069).abs() < 1e-4);
    }

    #[test]
    fn objective_chain3_tridiagonal_determinant() {
        // With S the exact inverse and lambda = 0, f = log det Theta - p.
        let theta = chain_precision(3);
        let s = spd_inverse(&theta).unwrap();
        let det3 = {
            let (a, b) = (1.25f64, -0.5f64);
            let d1 = a;
            let d2 = a * d1 - b * b;
            a * d2 - b * b * d1
        };
        let v = objective_value(&theta, &s, 0.0).unwrap();
        assert!((v - (det3.ln() - 3.0)).abs() < 1e-10);
    }

    #[test]
    fn objective_rejects_indefinite() {
        let theta = SymMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        assert!(objective_value(&theta, &SymMatrix::identity(2), 0.1).is_err());
    }

    #[test]
    fn run_diagonal_input_stays_diagonal() {
        let mut cfg = EstimatorConfig::with_thr0(0.05);
        cfg.lambda = 0.1;
        cfg.decay = 0.5;
        cfg.max_iters = 20;
        cfg.rho0 = 0.0;
        let result = run_sice_edat(&SymMatrix::identity(6), &cfg);
        assert_eq!(result.status, SolveStatus::MaxIters);
        assert_eq!(result.iters_run, 20);
        for rec in &result.trace {
            assert_eq!(rec.nnz_offdiag, 0);
        }
        assert_eq!(result.theta_hat.nnz_offdiag(0.0), 0);
    }

    #[test]
    fn run_chain_recovers_support() {
        // Chain graph with ample samples: the recovered support matches the
        // truth exactly.
        let prob = make_problem(ProblemKind::Chain, 50, 1000, &RngSpec::new(31)).unwrap();
        let mut cfg = EstimatorConfig::defaults_for(&prob.s_hat);
        cfg.lambda = defaults::CHAIN_BENCH_LAMBDA;
        let result = run_sice_edat(&prob.s_hat, &cfg);
        assert!(!result.status.is_failure(), "{:?}", result.status);
        let m = support_metrics(&result.theta_hat, &prob.support, 0.0).unwrap();
        assert_eq!(m.tpr, 1.0, "tpr {:?}", m);
        assert_eq!(m.fpr, 0.0, "fpr {:?}", m);
    }

    #[test]
    fn schedule_invariants_are_bit_exact() {
        let prob = make_problem(ProblemKind::Chain, 20, 40, &RngSpec::new(9)).unwrap();
        let mut cfg = EstimatorConfig::defaults_for(&prob.s_hat);
        cfg.lambda = defaults::CHAIN_BENCH_LAMBDA;
        let result = run_sice_edat(&prob.s_hat, &cfg);
        assert_eq!(result.iters_run, cfg.max_iters);
        let mut thr = cfg.thr0;
        for (k, rec) in result.trace.iter().enumerate() {
            assert_eq!(rec.k, k);
            // Geometric decay by repeated multiplication, bitwise.
            assert_eq!(rec.thr_k.to_bits(), thr.to_bits());
            // Step-size coupling mu_k = thr_k / lambda, bitwise.
            assert_eq!(rec.mu_k.to_bits(), (rec.thr_k / cfg.lambda).to_bits());
            thr *= cfg.decay;
        }
    }

    #[test]
    fn final_iterate_respects_threshold_floor() {
        let prob = make_problem(ProblemKind::Chain, 30, 60, &RngSpec::new(4)).unwrap();
        let mut cfg = EstimatorConfig::defaults_for(&prob.s_hat);
        cfg.lambda = defaults::CHAIN_BENCH_LAMBDA;
        cfg.max_iters = 40;
        let result = run_sice_edat(&prob.s_hat, &cfg);
        let final_thr = result.trace.last().unwrap().thr_k;
        for (i, j, v) in result.theta_hat.stored_entries() {
            if i != j {
                assert!(v == 0.0 || v.abs() >= final_thr, "entry {v} below {final_thr}");
            }
        }
    }

    #[test]
    fn permutation_equivariance() {
        let prob =
            crate::synthetic::make_problem_with(ProblemKind::Random, 8, 16, Some(24), &RngSpec::new(21))
                .unwrap();
        let mut cfg = EstimatorConfig::defaults_for(&prob.s_hat);
        cfg.max_iters = 25;
        let base = run_sice_edat(&prob.s_hat, &cfg);

        let perm = [3usize, 0, 7, 1, 5, 2, 6, 4];
        let permuted_input = prob.s_hat.permuted(&perm);
        let permuted_run = run_sice_edat(&permuted_input, &cfg);

        assert!(!base.status.is_failure() && !permuted_run.status.is_failure());
        let expected = base.theta_hat.permuted(&perm);
        assert!(
            permuted_run.theta_hat.max_abs_diff(&expected) < 1e-8,
            "equivariance residual {}",
            permuted_run.theta_hat.max_abs_diff(&expected)
        );
    }

    #[test]
    fn fixed_point_preserved_within_1e10() {
        // Construct fixed points of the step map: S = Theta*^{-1} makes the
        // residual vanish, and any threshold below the smallest nonzero
        // entry magnitude leaves Theta* untouched.
        let cases: Vec<SymMatrix> = vec![
            chain_precision(5),
            SymMatrix::diag(&[0.7, 2.0, 1.3]).unwrap(),
            SymMatrix::from_rows(&[
                &[2.0, 0.8, 0.0],
                &[0.8, 2.5, -0.9],
                &[0.0, -0.9, 3.0],
            ])
            .unwrap(),
        ];
        for theta_star in cases {
            let s = spd_inverse(&theta_star).unwrap();
            let min_nonzero = theta_star
                .stored_entries()
                .filter(|&(_, _, v)| v != 0.0)
                .map(|(_, _, v)| v.abs())
                .fold(f64::INFINITY, f64::min);
            let thr = 0.5 * min_nonzero;
            let cfg = EstimatorConfig { lambda: 0.1, ..EstimatorConfig::with_thr0(thr) };
            let out = sice_edat_step(&theta_star, &s, thr, &cfg, 0.0).unwrap();
            assert!(
                out.max_abs_diff(&theta_star) < 1e-10,
                "fixed point moved by {}",
                out.max_abs_diff(&theta_star)
            );
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // The smooth part g(Theta) = log det Theta - tr(S Theta) has
        // gradient Theta^{-1} - S. Perturbing a symmetric pair (i, j)
        // changes g at rate 2 (Theta^{-1} - S)_ij off the diagonal and
        // (Theta^{-1} - S)_ii on it.
        use rand::Rng;
        let mut rng = crate::synthetic::test_rng(17);
        let smooth = |theta: &SymMatrix, s: &SymMatrix| -> f64 {
            cholesky(theta).unwrap().log_det() - frob_inner(s, theta).unwrap()
        };
        for p in [2usize, 4, 8] {
            let raw: Vec<f64> = (0..p * p).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let theta = SymMatrix::from_dense(p, &raw).unwrap().add_diag(2.0 * p as f64);
            let sraw: Vec<f64> = (0..p * p).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let s = SymMatrix::from_dense(p, &sraw).unwrap().add_diag(1.0);

            let grad = spd_inverse(&theta).unwrap().zip_with(&s, |t, sv| t - sv).unwrap();
            let h = 1e-5;
            for i in 0..p {
                for j in 0..=i {
                    let mut plus = theta.clone();
                    plus.set_sym(i, j, theta.get(i, j) + h);
                    let mut minus = theta.clone();
                    minus.set_sym(i, j, theta.get(i, j) - h);
                    let fd = (smooth(&plus, &s) - smooth(&minus, &s)) / (2.0 * h);
                    let analytic = if i == j { grad.get(i, i) } else { 2.0 * grad.get(i, j) };
                    let rel = (fd - analytic).abs() / analytic.abs().max(1e-6);
                    assert!(rel <= 1e-5, "p={p} ({i},{j}): fd {fd} vs {analytic}");
                }
            }
        }
    }

    #[test]
    fn late_stage_objective_is_monotone() {
        let prob = make_problem(ProblemKind::Chain, 30, 200, &RngSpec::new(12)).unwrap();
        let mut cfg = EstimatorConfig::defaults_for(&prob.s_hat);
        cfg.lambda = defaults::CHAIN_BENCH_LAMBDA;
        let result = run_sice_edat(&prob.s_hat, &cfg);
        assert!(!result.status.is_failure());
        let half = result.trace.len() / 2;
        for w in result.trace[half..].windows(2) {
            assert!(
                w[1].objective >= w[0].objective - 1e-6,
                "objective dipped from {} to {} at k={}",
                w[0].objective,
                w[1].objective,
                w[1].k
            );
        }
    }

    #[test]
    fn invalid_config_reports_failure() {
        let mut cfg = EstimatorConfig::with_thr0(0.1);
        cfg.decay = 1.5;
        let result = run_sice_edat(&SymMatrix::identity(3), &cfg);
        assert!(result.status.is_failure());
        assert_eq!(result.iters_run, 0);
    }

    #[test]
    fn failed_run_preserves_trace() {
        // A wildly unstable configuration: huge mu with an indefinite
        // update eventually kills the inversion, but records up to the
        // failure survive.
        let prob = make_problem(ProblemKind::Chain, 10, 5, &RngSpec::new(2)).unwrap();
        let mut cfg = EstimatorConfig::with_thr0(1e6);
        cfg.lambda = 1e-6;
        cfg.rho0 = 0.0;
        cfg.max_iters = 50;
        let result = run_sice_edat(&prob.s_hat, &cfg);
        if result.status.is_failure() {
            assert_eq!(result.iters_run, result.trace.len());
        }
    }
}
