//! Ground-truth precision generators, GMRF sampling, and empirical
//! covariance construction.
//!
//! Randomness is fully pinned so golden files and reruns are byte-identical
//! on a given build: a 64-bit seed is expanded to a ChaCha20 key with
//! SplitMix64, uniform doubles come from the top 53 bits of the ChaCha20
//! stream, and Gaussian variates use the Box–Muller transform on those
//! uniforms. Reproducibility is guaranteed within this repository, not
//! across reimplementations in other languages.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, spd_inverse, CholeskyFactor, SymMatrix};

/// The one supported generator algorithm. The name pins the whole stream
/// construction: ChaCha20 keyed by SplitMix64 expansion of the seed, with
/// Box–Muller normals.
pub const RNG_ALGORITHM: &str = "chacha20";

/// A named, reproducible random stream: `(algorithm_name, seed)` determines
/// every draw.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSpec {
    pub algorithm_name: String,
    pub seed: u64,
}

impl RngSpec {
    /// Spec for the supported algorithm with the given seed.
    pub fn new(seed: u64) -> Self {
        RngSpec { algorithm_name: RNG_ALGORITHM.to_string(), seed }
    }

    /// Reject manifests that name an algorithm this build does not provide.
    pub fn validate(&self) -> Result<()> {
        if self.algorithm_name == RNG_ALGORITHM {
            Ok(())
        } else {
            Err(Error::UnknownRngAlgorithm(self.algorithm_name.clone()))
        }
    }

    /// Open the stream at its start.
    pub fn stream(&self) -> Result<RngStream> {
        self.validate()?;
        Ok(RngStream::from_seed(self.seed))
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// A ChaCha20-backed draw stream with Box–Muller normals.
pub struct RngStream {
    rng: ChaCha20Rng,
    spare_normal: Option<f64>,
}

impl RngStream {
    fn from_seed(seed: u64) -> Self {
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        RngStream { rng: ChaCha20Rng::from_seed(key), spare_normal: None }
    }

    /// Uniform draw in `(0, 1]` from the top 53 bits of the stream.
    fn uniform_open0(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[0, 1)`.
    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate (Box–Muller; pairs are buffered).
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let r = (-2.0 * self.uniform_open0().ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * self.uniform();
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Uniform integer in `[0, bound)`.
    pub fn below(&mut self, bound: usize) -> usize {
        self.rng.gen_range(0..bound)
    }

    /// Fair `+1.0` or `-1.0`.
    pub fn sign(&mut self) -> f64 {
        if self.rng.gen::<bool>() {
            1.0
        } else {
            -1.0
        }
    }
}

/// Which ground-truth structure a problem uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Chain,
    Random,
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProblemKind::Chain => write!(f, "chain"),
            ProblemKind::Random => write!(f, "random"),
        }
    }
}

/// A generated estimation problem: ground truth, its covariance, the drawn
/// samples, the empirical covariance, and the known off-diagonal support.
pub struct SyntheticProblem {
    pub theta_star: SymMatrix,
    pub sigma: SymMatrix,
    pub samples: SampleMatrix,
    pub s_hat: SymMatrix,
    /// Unordered pairs `(i, j)`, `i < j`, with nonzero ground-truth entries.
    pub support: Vec<(usize, usize)>,
    pub seed: u64,
    pub kind: ProblemKind,
}

/// Dense `n x p` sample matrix, row per draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    pub fn new(n: usize, p: usize, data: Vec<f64>) -> Self {
        assert!(n >= 1 && p >= 1, "sample matrix must be nonempty");
        assert_eq!(data.len(), n * p, "sample buffer size mismatch");
        SampleMatrix { n, p, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Chain-graph precision matrix: diagonal `1.25`, first off-diagonal `-0.5`.
/// Strictly diagonally dominant, hence SPD for every `p`.
pub fn chain_precision(p: usize) -> SymMatrix {
    assert!(p >= 1, "dimension must be at least 1");
    let mut m = SymMatrix::zeros(p);
    for i in 0..p {
        m.set_sym(i, i, 1.25);
        if i + 1 < p {
            m.set_sym(i + 1, i, -0.5);
        }
    }
    m
}

/// Random-sparsity precision matrix: draw a sparse `U` with entries `+-1`,
/// form `U^T U`, and add a diagonal term that guarantees positive
/// definiteness. The density of `U` is adjusted by bisection until the
/// off-diagonal support lands within 20% of `(target_nnz - p) / 2`
/// unordered pairs (`target_nnz` counts total nonzeros, diagonal included).
pub fn random_precision(p: usize, target_nnz: usize, rng: &RngSpec) -> Result<SymMatrix> {
    if target_nnz < p {
        return Err(Error::InvalidConfig(format!(
            "target_nnz = {target_nnz} must be at least p = {p}"
        )));
    }
    let mut stream = rng.stream()?;
    let target_pairs = (target_nnz - p) as f64 / 2.0;
    let band = 0.2 * target_pairs;
    let max_pairs = (p * (p - 1) / 2) as f64;
    if target_pairs - band > max_pairs {
        return Err(Error::GenerationFailed(format!(
            "target of {target_pairs:.0} off-diagonal pairs exceeds the {max_pairs:.0} available at p = {p}"
        )));
    }

    let mut lo = 1usize;
    let mut hi = p * p;
    // First probe near the expected density: spreading u entries over p
    // rows gives roughly u^2 / (2p) coincident column pairs.
    let mut u_nnz = (((2.0 * p as f64 * target_pairs).sqrt() as usize).max(1)).min(hi);
    for _attempt in 0..50 {
        let candidate = draw_gram(p, u_nnz, &mut stream);
        let pairs = candidate.nnz_offdiag(0.0) as f64;
        if (pairs - target_pairs).abs() <= band {
            return finalize_random_precision(candidate);
        }
        if pairs < target_pairs {
            lo = u_nnz + 1;
        } else {
            hi = u_nnz.saturating_sub(1).max(lo);
        }
        if lo >= hi {
            lo = 1;
            hi = p * p;
        }
        u_nnz = (lo + hi) / 2;
    }
    Err(Error::GenerationFailed(format!(
        "could not reach {target_pairs:.0} +- {band:.0} off-diagonal pairs in 50 attempts"
    )))
}

/// `U^T U` for a sparse `U` with `u_nnz` entries of `+-1` at distinct
/// uniformly random positions of a `p x p` grid.
fn draw_gram(p: usize, u_nnz: usize, stream: &mut RngStream) -> SymMatrix {
    let mut taken = std::collections::HashSet::with_capacity(u_nnz);
    // (row, col, value) triplets of U, grouped by row below.
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p];
    while taken.len() < u_nnz.min(p * p) {
        let cell = stream.below(p * p);
        if taken.insert(cell) {
            rows[cell / p].push((cell % p, stream.sign()));
        }
    }
    let mut gram = SymMatrix::zeros(p);
    for row in &rows {
        for (a, &(ca, va)) in row.iter().enumerate() {
            for &(cb, vb) in &row[a..] {
                let v = gram.get(ca, cb) + va * vb;
                gram.set_sym(ca, cb, v);
            }
        }
    }
    gram
}

fn finalize_random_precision(gram: SymMatrix) -> Result<SymMatrix> {
    // gram = U^T U is positive semidefinite, so its smallest eigenvalue is
    // at least the Gershgorin lower bound clipped at zero; `|estimate| + 1`
    // then makes the shifted matrix safely SPD.
    let p = gram.dim();
    let mut gersh = f64::INFINITY;
    for i in 0..p {
        let mut radius = 0.0;
        for j in 0..p {
            if j != i {
                radius += gram.get(i, j).abs();
            }
        }
        gersh = gersh.min(gram.get(i, i) - radius);
    }
    let min_eig_estimate = gersh.max(0.0);
    let mut delta = min_eig_estimate.abs() + 1.0;
    for _ in 0..4 {
        let candidate = gram.add_diag(delta);
        if cholesky(&candidate).is_ok() {
            return Ok(candidate);
        }
        delta *= 2.0;
    }
    Err(Error::GenerationFailed(
        "diagonal shift failed to produce an SPD matrix".to_string(),
    ))
}

/// Draw `n` i.i.d. rows from the zero-mean GMRF with precision
/// `theta_star`: `x = L z` with `L L^T = theta_star^{-1}` and standard
/// normal `z`.
pub fn sample_gmrf(theta_star: &SymMatrix, n: usize, rng: &RngSpec) -> Result<SampleMatrix> {
    let sigma = spd_inverse(theta_star)?;
    let factor = cholesky(&sigma)?;
    let mut stream = rng.stream()?;
    Ok(sample_gmrf_factored(&factor, n, &mut stream))
}

fn sample_gmrf_factored(sigma_factor: &CholeskyFactor, n: usize, stream: &mut RngStream) -> SampleMatrix {
    let p = sigma_factor.dim();
    let mut data = Vec::with_capacity(n * p);
    let mut z = vec![0.0f64; p];
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi = stream.normal();
        }
        data.extend_from_slice(&sigma_factor.mul_lower(&z));
    }
    SampleMatrix::new(n, p, data)
}

/// Empirical covariance `S = X^T X / n`, optionally subtracting the column
/// means first. The generators produce zero-mean data, so `center = false`
/// is the default reading everywhere in this crate.
pub fn empirical_covariance(samples: &SampleMatrix, center: bool) -> SymMatrix {
    let (n, p) = (samples.n(), samples.p());
    let mut means = vec![0.0f64; p];
    if center {
        for i in 0..n {
            for (m, &x) in means.iter_mut().zip(samples.row(i)) {
                *m += x;
            }
        }
        for m in means.iter_mut() {
            *m /= n as f64;
        }
    }
    let mut acc = vec![0.0f64; p * (p + 1) / 2];
    let mut centered = vec![0.0f64; p];
    for r in 0..n {
        let row = samples.row(r);
        for (c, (&x, &m)) in row.iter().zip(means.iter()).enumerate() {
            centered[c] = x - m;
        }
        let mut idx = 0;
        for i in 0..p {
            let xi = centered[i];
            for j in 0..=i {
                acc[idx] += xi * centered[j];
                idx += 1;
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    for v in acc.iter_mut() {
        *v *= inv_n;
    }
    SymMatrix::from_lower(p, acc)
}

/// Compose the generators into a full problem. `target_nnz` applies to the
/// random kind only and defaults to `10 p`.
pub fn make_problem_with(
    kind: ProblemKind,
    p: usize,
    n: usize,
    target_nnz: Option<usize>,
    rng: &RngSpec,
) -> Result<SyntheticProblem> {
    if p < 2 {
        return Err(Error::InvalidConfig(format!("p = {p} must be at least 2")));
    }
    if n < 1 {
        return Err(Error::InvalidConfig("n must be at least 1".to_string()));
    }
    rng.validate()?;
    let theta_star = match kind {
        ProblemKind::Chain => chain_precision(p),
        ProblemKind::Random => random_precision(p, target_nnz.unwrap_or(10 * p), rng)?,
    };
    let sigma = spd_inverse(&theta_star)?;
    let factor = cholesky(&sigma)?;
    // The generator stream (used by the random kind) is distinct from the
    // sampling stream, so chain and random problems with the same seed do
    // not share draws.
    let sample_spec = RngSpec::new(rng.seed.wrapping_add(0x53_41_4d_50));
    let mut stream = sample_spec.stream()?;
    let samples = sample_gmrf_factored(&factor, n, &mut stream);
    let s_hat = empirical_covariance(&samples, false);
    let support = theta_star.offdiag_support();
    Ok(SyntheticProblem { theta_star, sigma, samples, s_hat, support, seed: rng.seed, kind })
}

/// [`make_problem_with`] using the default `10 p` density for random graphs.
pub fn make_problem(kind: ProblemKind, p: usize, n: usize, rng: &RngSpec) -> Result<SyntheticProblem> {
    make_problem_with(kind, p, n, None, rng)
}

#[cfg(test)]
pub(crate) fn test_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frob_inner;

    #[test]
    fn chain_p1() {
        let m = chain_precision(1);
        assert_eq!(m.dim(), 1);
        assert_eq!(m.get(0, 0), 1.25);
    }

    #[test]
    fn chain_p3_entries() {
        let m = chain_precision(3);
        let expected = SymMatrix::from_rows(&[
            &[1.25, -0.5, 0.0],
            &[-0.5, 1.25, -0.5],
            &[0.0, -0.5, 1.25],
        ])
        .unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn chain_support_count() {
        for p in [2usize, 5, 17] {
            assert_eq!(chain_precision(p).offdiag_support().len(), p - 1);
        }
    }

    #[test]
    fn chain_is_spd_up_to_64() {
        for p in 1..=64 {
            assert!(cholesky(&chain_precision(p)).is_ok(), "p = {p}");
        }
    }

    #[test]
    fn random_precision_hand_case() {
        // U = [[1, 1]]: U^T U = [[1,1],[1,1]], shift makes diag 2;
        // eigenvalues 3 and 1.
        let gram = SymMatrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        let m = finalize_random_precision(gram).unwrap();
        let expected = SymMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn random_precision_spd_and_symmetric_support() {
        for seed in 0..100u64 {
            for p in [20usize, 50] {
                let m = random_precision(p, 10 * p, &RngSpec::new(seed)).unwrap();
                assert!(cholesky(&m).is_ok(), "seed {seed} p {p} not SPD");
                let target_pairs = (10 * p - p) as f64 / 2.0;
                let pairs = m.nnz_offdiag(0.0) as f64;
                assert!(
                    (pairs - target_pairs).abs() <= 0.2 * target_pairs,
                    "seed {seed} p {p}: {pairs} pairs vs target {target_pairs}"
                );
            }
        }
    }

    #[test]
    fn sampler_identity_covariance() {
        let spec = RngSpec::new(99);
        let samples = sample_gmrf(&SymMatrix::identity(8), 100_000, &spec).unwrap();
        let s_hat = empirical_covariance(&samples, false);
        assert!(s_hat.max_abs_diff(&SymMatrix::identity(8)) < 0.05);
    }

    #[test]
    fn sampler_is_deterministic() {
        let spec = RngSpec::new(7);
        let a = sample_gmrf(&chain_precision(4), 50, &spec).unwrap();
        let b = sample_gmrf(&chain_precision(4), 50, &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampler_chain2_correlation() {
        // Closed-form 2x2 inverse of the chain precision gives the target
        // correlation Sigma_12 / sqrt(Sigma_11 Sigma_22) = 0.4.
        let theta = chain_precision(2);
        let det = 1.25 * 1.25 - 0.25;
        let sigma11 = 1.25 / det;
        let sigma12 = 0.5 / det;
        let target: f64 = sigma12 / sigma11;
        assert!((target - 0.4).abs() < 1e-15);

        let samples = sample_gmrf(&theta, 100_000, &RngSpec::new(123)).unwrap();
        let s_hat = empirical_covariance(&samples, false);
        let corr = s_hat.get(0, 1) / (s_hat.get(0, 0) * s_hat.get(1, 1)).sqrt();
        assert!((corr - target).abs() < 0.02, "corr = {corr}");
    }

    #[test]
    fn covariance_identity_rows() {
        let x = SampleMatrix::new(2, 2, vec![1.0, 0.0, 0.0, 1.0]);
        let s = empirical_covariance(&x, false);
        assert!(s.max_abs_diff(&SymMatrix::diag(&[0.5, 0.5]).unwrap()) < 1e-15);
    }

    #[test]
    fn covariance_rank_deficient_when_undersampled() {
        let spec = RngSpec::new(5);
        let samples = sample_gmrf(&chain_precision(6), 3, &spec).unwrap();
        let s_hat = empirical_covariance(&samples, false);
        assert!(cholesky(&s_hat).is_err());
        assert!(cholesky(&s_hat.add_diag(1e-6)).is_ok());
    }

    #[test]
    fn covariance_single_sample_outer_product() {
        let x = SampleMatrix::new(1, 3, vec![1.0, -2.0, 0.5]);
        let s = empirical_covariance(&x, false);
        for i in 0..3 {
            for j in 0..3 {
                assert!((s.get(i, j) - x.row(0)[i] * x.row(0)[j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn covariance_centering_removes_mean() {
        let x = SampleMatrix::new(4, 1, vec![9.0, 11.0, 10.0, 10.0]);
        let s = empirical_covariance(&x, true);
        assert!((s.get(0, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn make_problem_chain_shape() {
        let p = 100;
        let prob = make_problem(ProblemKind::Chain, p, 50, &RngSpec::new(1)).unwrap();
        assert_eq!(prob.support.len(), 99);
        assert!(cholesky(&prob.s_hat).is_err(), "rank should be at most n = 50");
        // sigma is the inverse of theta_star: || sigma theta_star - I ||_max
        // stays within 1e-8 * p.
        let sd = prob.sigma.to_dense();
        let td = prob.theta_star.to_dense();
        let mut worst = 0.0f64;
        for i in 0..p {
            for j in 0..p {
                let mut s = 0.0;
                for k in 0..p {
                    s += sd[i * p + k] * td[k * p + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        assert!(worst < 1e-8 * p as f64, "max residual {worst}");
    }

    #[test]
    fn make_problem_random_density() {
        let prob = make_problem(ProblemKind::Random, 200, 100, &RngSpec::new(2)).unwrap();
        let pairs = prob.support.len() as f64;
        let target = (10.0 * 200.0 - 200.0) / 2.0;
        assert!((pairs - target).abs() <= 0.2 * target, "pairs = {pairs}");
    }

    #[test]
    fn make_problem_is_deterministic() {
        let a = make_problem(ProblemKind::Random, 30, 15, &RngSpec::new(77)).unwrap();
        let b = make_problem(ProblemKind::Random, 30, 15, &RngSpec::new(77)).unwrap();
        assert_eq!(a.theta_star, b.theta_star);
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.support, b.support);
    }

    #[test]
    fn consistency_error_shrinks_with_n() {
        // Central-limit behavior: || S_n - Sigma ||_F falls as n grows,
        // averaged over seeds.
        let theta = chain_precision(6);
        let sigma = spd_inverse(&theta).unwrap();
        let mut mean_err = Vec::new();
        for n in [1_000usize, 10_000, 100_000] {
            let mut total = 0.0;
            for seed in 0..20u64 {
                let samples = sample_gmrf(&theta, n, &RngSpec::new(seed)).unwrap();
                let s_hat = empirical_covariance(&samples, false);
                let diff = s_hat.zip_with(&sigma, |a, b| a - b).unwrap();
                total += frob_inner(&diff, &diff).unwrap().sqrt();
            }
            mean_err.push(total / 20.0);
        }
        assert!(mean_err[0] > mean_err[1] && mean_err[1] > mean_err[2], "{mean_err:?}");
    }

    #[test]
    fn rng_spec_rejects_unknown_algorithm() {
        let spec = RngSpec { algorithm_name: "mt19937".to_string(), seed: 1 };
        assert!(matches!(spec.stream(), Err(Error::UnknownRngAlgorithm(_))));
    }
}
