//! Implementations of the `generate`, `estimate`, `benchmark`, and
//! `evaluate` subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::baseline::run_gista;
use crate::error::{Error, Result};
use crate::estimator::{run_sice_edat, EstimationResult, IterationRecord};
use crate::linalg::SymMatrix;
use crate::metrics::{frob_error, support_metrics};
use crate::stf::{read_stf_file, write_stf_file};
use crate::synthetic::{make_problem_with, RngSpec, SyntheticProblem, RNG_ALGORITHM};

use super::config::{ExperimentSpec, Method};
use super::report::{RunReport, SeedRow};

/// Manifest written next to generated problem files; rerunning `generate`
/// with the same manifest inputs reproduces every file byte for byte.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub rng_algorithm: String,
    pub kind: String,
    pub p: usize,
    pub n: usize,
    pub target_nnz: Option<usize>,
    pub threads: usize,
    pub problems: Vec<ManifestEntry>,
}

#[derive(Debug, Serialize)]
pub struct ManifestEntry {
    pub seed: u64,
    pub theta_star: String,
    pub s_hat: String,
    pub support_pairs: usize,
}

fn build_problem(spec: &ExperimentSpec, seed: u64) -> Result<SyntheticProblem> {
    make_problem_with(spec.kind, spec.p, spec.n, spec.target_nnz, &RngSpec::new(seed))
}

/// Generate ground truth and empirical covariance files for every seed.
pub fn cmd_generate(spec: &ExperimentSpec) -> Result<Manifest> {
    let dir = &spec.output_path;
    std::fs::create_dir_all(dir)?;
    let mut entries = Vec::new();
    for &seed in &spec.seeds {
        let problem = build_problem(spec, seed)?;
        let seed_dir = dir.join(format!("seed-{seed}"));
        std::fs::create_dir_all(&seed_dir)?;
        let theta_path = seed_dir.join("theta_star.stf");
        let s_path = seed_dir.join("s_hat.stf");
        write_stf_file(&theta_path, &problem.theta_star)?;
        write_stf_file(&s_path, &problem.s_hat)?;
        entries.push(ManifestEntry {
            seed,
            theta_star: format!("seed-{seed}/theta_star.stf"),
            s_hat: format!("seed-{seed}/s_hat.stf"),
            support_pairs: problem.support.len(),
        });
    }
    let manifest = Manifest {
        rng_algorithm: RNG_ALGORITHM.to_string(),
        kind: spec.kind.to_string(),
        p: spec.p,
        n: spec.n,
        target_nnz: spec.target_nnz,
        threads: rayon::current_num_threads(),
        problems: entries,
    };
    let file = std::fs::File::create(dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), &manifest)?;
    Ok(manifest)
}

/// Write the iteration trace as CSV.
pub fn write_trace<W: Write>(mut w: W, trace: &[IterationRecord]) -> Result<()> {
    writeln!(w, "k,thr_k,mu_k,rho_k,objective,nnz_offdiag,delta_rel")?;
    for r in trace {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.k, r.thr_k, r.mu_k, r.rho_k, r.objective, r.nnz_offdiag, r.delta_rel
        )?;
    }
    Ok(())
}

fn run_method(
    method: Method,
    s_hat: &SymMatrix,
    spec: &ExperimentSpec,
) -> EstimationResult {
    match method {
        Method::SiceEdat => run_sice_edat(s_hat, &spec.estimator.to_config(s_hat)),
        Method::Gista => run_gista(s_hat, &spec.baseline.to_config()),
    }
}

/// Run one solver on a matrix file; writes `theta_hat.stf` and `trace.csv`.
///
/// A solver failure still flushes the partial trace before surfacing the
/// error, so the written files describe everything that ran.
pub fn cmd_estimate(
    input: &Path,
    method: Method,
    spec: &ExperimentSpec,
    out_dir: &Path,
) -> Result<EstimationResult> {
    let s_hat = read_stf_file(input)?;
    let result = run_method(method, &s_hat, spec);

    std::fs::create_dir_all(out_dir)?;
    let trace_file = std::fs::File::create(out_dir.join("trace.csv"))?;
    write_trace(std::io::BufWriter::new(trace_file), &result.trace)?;
    write_stf_file(&out_dir.join("theta_hat.stf"), &result.theta_hat)?;

    if result.status.is_failure() {
        return Err(Error::Solver(result.status.label()));
    }
    Ok(result)
}

/// Run generate -> estimate -> evaluate for every (seed, method) pair and
/// assemble the report. Seeds run in parallel workers; each owns its RNG
/// stream, and the merged table is sorted by seed, so the report content is
/// independent of scheduling. Per-seed failures are recorded as rows and
/// the run continues.
pub fn cmd_benchmark(spec: &ExperimentSpec) -> Result<RunReport> {
    let rows: Vec<SeedRow> = spec
        .seeds
        .par_iter()
        .map(|&seed| benchmark_seed(spec, seed))
        .collect::<Result<Vec<Vec<SeedRow>>>>()?
        .into_iter()
        .flatten()
        .collect();

    let report = RunReport::new(spec.clone(), rows);
    report.write_files(&spec.output_path)?;
    Ok(report)
}

fn benchmark_seed(spec: &ExperimentSpec, seed: u64) -> Result<Vec<SeedRow>> {
    let problem = match build_problem(spec, seed) {
        Ok(p) => p,
        Err(e) => {
            // A generation failure poisons every method for this seed.
            return Ok(spec
                .methods
                .iter()
                .map(|m| SeedRow {
                    method: m.name().to_string(),
                    seed,
                    status: format!("generation failed: {e}"),
                    ok: false,
                    metrics: None,
                    frob_error: None,
                    wall_time_seconds: 0.0,
                    iters_run: 0,
                    final_objective: f64::NEG_INFINITY,
                })
                .collect());
        }
    };

    let mut rows = Vec::with_capacity(spec.methods.len());
    for &method in &spec.methods {
        let started = Instant::now();
        let result = run_method(method, &problem.s_hat, spec);
        let wall_time_seconds = started.elapsed().as_secs_f64();

        let ok = !result.status.is_failure();
        let (metrics, frob) = if ok {
            (
                Some(support_metrics(&result.theta_hat, &problem.support, 0.0)?),
                Some(frob_error(&result.theta_hat, &problem.theta_star)?),
            )
        } else {
            (None, None)
        };
        rows.push(SeedRow {
            method: method.name().to_string(),
            seed,
            status: result.status.label(),
            ok,
            metrics,
            frob_error: frob,
            wall_time_seconds,
            iters_run: result.iters_run,
            final_objective: result.final_objective(),
        });
    }
    Ok(rows)
}

/// Outcome of `evaluate`: support metrics plus the Frobenius distance.
#[derive(Debug, Serialize)]
pub struct Evaluation {
    pub tpr: f64,
    pub fpr: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    pub frob_error: f64,
}

/// Compare an estimate file against a ground-truth file.
pub fn cmd_evaluate(estimate: &Path, truth: &Path, zero_tol: f64, out: Option<&PathBuf>) -> Result<Evaluation> {
    let theta_hat = read_stf_file(estimate)?;
    let theta_star = read_stf_file(truth)?;
    let support = theta_star.offdiag_support();
    let m = support_metrics(&theta_hat, &support, zero_tol)?;
    let eval = Evaluation {
        tpr: m.tpr,
        fpr: m.fpr,
        tp: m.tp,
        fp: m.fp,
        tn: m.tn,
        fn_: m.fn_,
        frob_error: frob_error(&theta_hat, &theta_star)?,
    };
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let file = std::fs::File::create(dir.join("evaluation.json"))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), &eval)?;
    }
    Ok(eval)
}
