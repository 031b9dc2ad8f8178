//! Sparse inverse covariance estimation through transform-domain updates
//! and exponentially decaying adaptive hard thresholding, with a
//! proximal-gradient baseline, synthetic GMRF problem generators, and a
//! support-recovery benchmark harness.
//!
//! The estimator maximizes the regularized log-det program
//!
//! ```text
//! f(Theta) = log det(Theta) - tr(S Theta) - lambda ||Theta||_1
//! ```
//!
//! over symmetric positive definite matrices by correcting the inverse of
//! the current iterate toward the empirical covariance, re-inverting under
//! Tikhonov regularization, and hard-thresholding at a geometrically
//! decaying level. See [`estimator`] for the update rule, [`baseline`] for
//! the soft-thresholding comparison solver and the small-instance reference
//! oracle, and [`cli`] for the experiment runner behind the `sice-edat`
//! binary.

pub mod baseline;
pub mod cli;
pub mod defaults;
pub mod error;
pub mod estimator;
pub mod linalg;
pub mod metrics;
pub mod stf;
pub mod synthetic;

pub use error::{Error, Result};
pub use estimator::{
    init_theta, objective_value, run_sice_edat, sice_edat_step, EstimationResult,
    EstimatorConfig, IterationRecord, SolveStatus,
};
pub use baseline::{gista_step, reference_solve, run_gista, subgradient_violation, BaselineConfig};
pub use linalg::{
    cholesky, frob_inner, hard_threshold, log_det, soft_threshold, spd_inverse, CholeskyFactor,
    SymMatrix,
};
pub use metrics::{assumption_diagnostics, frob_error, support_metrics, AssumptionReport, SupportMetrics};
pub use synthetic::{
    chain_precision, empirical_covariance, make_problem, make_problem_with, random_precision,
    sample_gmrf, ProblemKind, RngSpec, SampleMatrix, SyntheticProblem,
};
