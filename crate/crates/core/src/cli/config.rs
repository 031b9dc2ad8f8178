//! Line-oriented `key = value` experiment configuration.
//!
//! Unknown keys are errors: a typo never silently falls back to a default.
//! Missing optional keys take the documented defaults. Lines that are empty
//! or start with `#` are skipped.

use std::path::PathBuf;

use serde::Serialize;

use crate::defaults;
use crate::error::{Error, Result};
use crate::estimator::{default_thr0, EstimatorConfig};
use crate::baseline::BaselineConfig;
use crate::linalg::SymMatrix;
use crate::synthetic::ProblemKind;

/// Which solver a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SiceEdat,
    Gista,
}

impl Method {
    pub fn parse(text: &str) -> Option<Method> {
        match text {
            "sice-edat" => Some(Method::SiceEdat),
            "gista" => Some(Method::Gista),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::SiceEdat => "sice-edat",
            Method::Gista => "gista",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Estimator knobs as they appear in config files; `thr0` stays optional
/// because its default is derived from the input matrix.
#[derive(Debug, Clone, Serialize)]
pub struct EstimatorSettings {
    pub lambda: f64,
    pub thr0: Option<f64>,
    pub decay: f64,
    pub rho0: f64,
    pub rho_growth: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub skip_diagonal: bool,
    pub jitter_base: f64,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        EstimatorSettings {
            lambda: defaults::LAMBDA,
            thr0: None,
            decay: defaults::DECAY,
            rho0: defaults::RHO0,
            rho_growth: defaults::RHO_GROWTH,
            max_iters: defaults::MAX_ITERS,
            rel_tol: defaults::REL_TOL,
            skip_diagonal: defaults::SKIP_DIAGONAL,
            jitter_base: defaults::JITTER_BASE,
        }
    }
}

impl EstimatorSettings {
    /// Resolve the data-dependent threshold default against a concrete
    /// input matrix.
    pub fn to_config(&self, s_hat: &SymMatrix) -> EstimatorConfig {
        EstimatorConfig {
            lambda: self.lambda,
            thr0: self.thr0.unwrap_or_else(|| default_thr0(s_hat)),
            decay: self.decay,
            rho0: self.rho0,
            rho_growth: self.rho_growth,
            max_iters: self.max_iters,
            rel_tol: self.rel_tol,
            skip_diagonal: self.skip_diagonal,
            jitter_base: self.jitter_base,
        }
    }
}

/// Baseline knobs as they appear in config files.
#[derive(Debug, Clone, Serialize)]
pub struct BaselineSettings {
    pub lambda: f64,
    pub step0: f64,
    pub backtrack: f64,
    pub max_iters: usize,
    pub obj_tol: f64,
}

impl Default for BaselineSettings {
    fn default() -> Self {
        BaselineSettings {
            lambda: defaults::LAMBDA,
            step0: defaults::BASELINE_STEP0,
            backtrack: defaults::BASELINE_BACKTRACK,
            max_iters: defaults::BASELINE_MAX_ITERS,
            obj_tol: defaults::BASELINE_OBJ_TOL,
        }
    }
}

impl BaselineSettings {
    pub fn to_config(&self) -> BaselineConfig {
        BaselineConfig {
            lambda: self.lambda,
            step0: self.step0,
            backtrack: self.backtrack,
            max_iters: self.max_iters,
            obj_tol: self.obj_tol,
        }
    }
}

/// A full experiment: problem family, sizes, seeds, methods, solver knobs,
/// and the output directory.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSpec {
    pub kind: ProblemKind,
    pub p: usize,
    pub n: usize,
    /// Total nonzero target for random graphs (diagonal included);
    /// `None` means the default `10 p`.
    pub target_nnz: Option<usize>,
    /// Sorted, deduplicated; nonempty.
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    pub estimator: EstimatorSettings,
    pub baseline: BaselineSettings,
    pub output_path: PathBuf,
}

/// Parse the line-oriented config format.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let mut kind: Option<(ProblemKind, usize)> = None;
    let mut p: Option<(usize, usize)> = None;
    let mut n: Option<usize> = None;
    let mut target_nnz = None;
    let mut seeds: Option<Vec<u64>> = None;
    let mut methods = vec![Method::SiceEdat];
    let mut estimator = EstimatorSettings::default();
    let mut baseline = BaselineSettings::default();
    let mut output_path = PathBuf::from("out");

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(line_no, "expected 'key = value'"));
        };
        let key = key.trim();
        let value = value.trim();

        macro_rules! num {
            ($ty:ty) => {
                value.parse::<$ty>().map_err(|_| {
                    Error::parse(line_no, format!("invalid value {value:?} for key {key:?}"))
                })?
            };
        }
        macro_rules! positive {
            () => {{
                let v = num!(f64);
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::parse(line_no, format!("{key} must be positive")));
                }
                v
            }};
        }

        match key {
            "kind" => {
                kind = Some((
                    match value {
                        "chain" => ProblemKind::Chain,
                        "random" => ProblemKind::Random,
                        _ => {
                            return Err(Error::parse(
                                line_no,
                                format!("kind must be 'chain' or 'random', got {value:?}"),
                            ))
                        }
                    },
                    line_no,
                ));
            }
            "p" => {
                let v = num!(usize);
                if v < 2 {
                    return Err(Error::parse(line_no, "p must be at least 2"));
                }
                p = Some((v, line_no));
            }
            "n" => {
                let v = num!(usize);
                if v < 1 {
                    return Err(Error::parse(line_no, "n must be at least 1"));
                }
                n = Some(v);
            }
            "target_nnz" => target_nnz = Some(num!(usize)),
            "seeds" => {
                let mut list = Vec::new();
                for part in value.split(',') {
                    let part = part.trim();
                    list.push(part.parse::<u64>().map_err(|_| {
                        Error::parse(line_no, format!("invalid seed {part:?}"))
                    })?);
                }
                if list.is_empty() {
                    return Err(Error::parse(line_no, "seeds must be nonempty"));
                }
                list.sort_unstable();
                list.dedup();
                seeds = Some(list);
            }
            "methods" => {
                let mut list = Vec::new();
                for part in value.split(',') {
                    let part = part.trim();
                    let m = Method::parse(part).ok_or_else(|| {
                        Error::parse(line_no, format!("unknown method {part:?}"))
                    })?;
                    if !list.contains(&m) {
                        list.push(m);
                    }
                }
                if list.is_empty() {
                    return Err(Error::parse(line_no, "methods must be nonempty"));
                }
                methods = list;
            }
            "lambda" => estimator.lambda = positive!(),
            "thr0" => estimator.thr0 = Some(positive!()),
            "decay" => {
                let v = num!(f64);
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::parse(line_no, "decay must lie in (0, 1)"));
                }
                estimator.decay = v;
            }
            "rho0" => {
                let v = num!(f64);
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::parse(line_no, "rho0 must be nonnegative"));
                }
                estimator.rho0 = v;
            }
            "rho_growth" => {
                let v = num!(f64);
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::parse(line_no, "rho_growth must be nonnegative"));
                }
                estimator.rho_growth = v;
            }
            "iters" => {
                let v = num!(usize);
                if v == 0 {
                    return Err(Error::parse(line_no, "iters must be at least 1"));
                }
                estimator.max_iters = v;
            }
            "rel_tol" => {
                let v = num!(f64);
                if !(v >= 0.0) {
                    return Err(Error::parse(line_no, "rel_tol must be nonnegative"));
                }
                estimator.rel_tol = v;
            }
            "skip_diagonal" => {
                estimator.skip_diagonal = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(Error::parse(line_no, "skip_diagonal must be true or false")),
                };
            }
            "jitter_base" => estimator.jitter_base = positive!(),
            "baseline_lambda" => {
                let v = num!(f64);
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::parse(line_no, "baseline_lambda must be nonnegative"));
                }
                baseline.lambda = v;
            }
            "baseline_step0" => baseline.step0 = positive!(),
            "baseline_backtrack" => {
                let v = num!(f64);
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::parse(line_no, "baseline_backtrack must lie in (0, 1)"));
                }
                baseline.backtrack = v;
            }
            "baseline_iters" => {
                let v = num!(usize);
                if v == 0 {
                    return Err(Error::parse(line_no, "baseline_iters must be at least 1"));
                }
                baseline.max_iters = v;
            }
            "baseline_obj_tol" => {
                let v = num!(f64);
                if !(v >= 0.0) {
                    return Err(Error::parse(line_no, "baseline_obj_tol must be nonnegative"));
                }
                baseline.obj_tol = v;
            }
            "out" => output_path = PathBuf::from(value),
            _ => {
                return Err(Error::parse(line_no, format!("unknown key {key:?}")));
            }
        }
    }

    let (kind, _) = kind.ok_or_else(|| Error::parse(0, "missing required key 'kind'"))?;
    let (p, _) = p.ok_or_else(|| Error::parse(0, "missing required key 'p'"))?;
    let seeds = seeds.ok_or_else(|| Error::parse(0, "missing required key 'seeds'"))?;
    let n = n.unwrap_or_else(|| (p / 2).max(1));

    Ok(ExperimentSpec {
        kind,
        p,
        n,
        target_nnz,
        seeds,
        methods,
        estimator,
        baseline,
        output_path,
    })
}
