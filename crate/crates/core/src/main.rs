use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sice_edat::cli::{commands, parse_config, ExperimentSpec, Method};
use sice_edat::error::Result;

/// Sparse inverse covariance estimation benchmark runner.
#[derive(Parser)]
#[command(name = "sice-edat", version, about)]
struct Cli {
    /// Worker threads for seed-parallel runs and kernel internals
    /// (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate ground-truth and empirical covariance files per seed.
    Generate {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run one solver on a matrix file.
    Estimate {
        /// Input matrix in STF.
        #[arg(long)]
        input: PathBuf,
        /// Solver: sice-edat or gista.
        #[arg(long, default_value = "sice-edat")]
        method: String,
        /// Output directory for theta_hat.stf and trace.csv.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        overrides: SolverOverrides,
    },
    /// Generate, estimate, and evaluate every (method, seed) pair.
    Benchmark {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare an estimate against a ground-truth matrix.
    Evaluate {
        /// Estimated matrix in STF.
        #[arg(long)]
        estimate: PathBuf,
        /// Ground-truth matrix in STF.
        #[arg(long)]
        truth: PathBuf,
        /// Entries with magnitude at most this count as zero.
        #[arg(long, default_value_t = 0.0)]
        zero_tol: f64,
        /// Optional directory for evaluation.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file (line-oriented `key = value`).
    #[arg(long)]
    config: PathBuf,
    /// Replace the config's seed list with a single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: SolverOverrides,
}

#[derive(Args)]
struct SolverOverrides {
    /// l1 weight.
    #[arg(long)]
    lambda: Option<f64>,
    /// Initial hard-threshold level (default: derived from the data).
    #[arg(long)]
    thr0: Option<f64>,
    /// Threshold decay factor in (0, 1).
    #[arg(long)]
    decay: Option<f64>,
    /// Initial Tikhonov constant.
    #[arg(long)]
    rho0: Option<f64>,
    /// Per-iteration multiplier on the Tikhonov constant.
    #[arg(long)]
    rho_growth: Option<f64>,
    /// Iteration cap.
    #[arg(long)]
    iters: Option<usize>,
    /// Early-stop tolerance on the relative iterate change.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Baseline l1 weight.
    #[arg(long)]
    baseline_lambda: Option<f64>,
}

impl SolverOverrides {
    fn apply(&self, spec: &mut ExperimentSpec) {
        if let Some(v) = self.lambda {
            spec.estimator.lambda = v;
        }
        if let Some(v) = self.thr0 {
            spec.estimator.thr0 = Some(v);
        }
        if let Some(v) = self.decay {
            spec.estimator.decay = v;
        }
        if let Some(v) = self.rho0 {
            spec.estimator.rho0 = v;
        }
        if let Some(v) = self.rho_growth {
            spec.estimator.rho_growth = v;
        }
        if let Some(v) = self.iters {
            spec.estimator.max_iters = v;
        }
        if let Some(v) = self.rel_tol {
            spec.estimator.rel_tol = v;
        }
        if let Some(v) = self.baseline_lambda {
            spec.baseline.lambda = v;
        }
    }
}

fn load_spec(run: &RunArgs) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(&run.config)?;
    let mut spec = parse_config(&text)?;
    if let Some(seed) = run.seed {
        spec.seeds = vec![seed];
    }
    if let Some(out) = &run.out {
        spec.output_path = out.clone();
    }
    run.overrides.apply(&mut spec);
    Ok(spec)
}

/// A default spec for `estimate`, which has no config file: only the solver
/// settings matter there.
fn estimate_spec(out: &PathBuf, overrides: &SolverOverrides) -> ExperimentSpec {
    let mut spec = parse_config("kind = chain\np = 2\nseeds = 0").expect("static config");
    spec.output_path = out.clone();
    overrides.apply(&mut spec);
    spec
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| sice_edat::Error::InvalidConfig(e.to_string()))?;
    }
    match cli.command {
        Command::Generate { run } => {
            let spec = load_spec(&run)?;
            let manifest = commands::cmd_generate(&spec)?;
            println!(
                "generated {} problem(s) under {}",
                manifest.problems.len(),
                spec.output_path.display()
            );
            Ok(true)
        }
        Command::Estimate { input, method, out, overrides } => {
            let method = Method::parse(&method).ok_or_else(|| {
                sice_edat::Error::InvalidConfig(format!("unknown method {method:?}"))
            })?;
            let spec = estimate_spec(&out, &overrides);
            let result = commands::cmd_estimate(&input, method, &spec, &out)?;
            println!(
                "{}: {} after {} iteration(s), final objective {}",
                method,
                result.status.label(),
                result.iters_run,
                result.final_objective()
            );
            Ok(true)
        }
        Command::Benchmark { run } => {
            let spec = load_spec(&run)?;
            let report = commands::cmd_benchmark(&spec)?;
            for a in &report.aggregates {
                println!(
                    "{}: mean tpr {:.4} mean fpr {:.6} mean time {:.3}s over {} seed(s)",
                    a.method, a.mean_tpr, a.mean_fpr, a.mean_time, a.seeds_ok
                );
            }
            println!("report written to {}", spec.output_path.display());
            Ok(report.all_ok())
        }
        Command::Evaluate { estimate, truth, zero_tol, out } => {
            let eval = commands::cmd_evaluate(&estimate, &truth, zero_tol, out.as_ref())?;
            println!(
                "tpr {} fpr {} (tp {} fp {} tn {} fn {}) frob_error {}",
                eval.tpr, eval.fpr, eval.tp, eval.fp, eval.tn, eval.fn_, eval.frob_error
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
