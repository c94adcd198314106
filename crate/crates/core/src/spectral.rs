//! Eigenpairs of symmetric operators by power iteration with deflation.
//!
//! Every iteration runs on a shifted operator `c I + s M` with `c` an upper
//! bound on the spectral radius of `M` and `s = ±1`, so the iterated operator
//! is positive semi-definite and the dominant eigenvalue is the largest
//! (`s = 1`) or smallest (`s = -1`) eigenvalue of `M` in the subspace
//! orthogonal to the deflation vectors. Deflation vectors are projected out
//! twice per step.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphgen::component_rng;

/// A real symmetric linear operator.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = M x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// Upper bound on the spectral radius (a Gershgorin bound is fine).
    fn norm_bound(&self) -> f64;
}

impl SymmetricOperator for Graph {
    fn dim(&self) -> usize {
        self.num_vertices()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (v, out) in y.iter_mut().enumerate() {
            *out = self.neighbors(v).iter().map(|&u| x[u]).sum();
        }
    }

    fn norm_bound(&self) -> f64 {
        self.max_degree() as f64
    }
}

/// `(A x)_i = sum of x_j over neighbors j of i`.
pub fn matvec(graph: &Graph, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != graph.num_vertices() {
        return Err(Error::LengthMismatch {
            expected: graph.num_vertices(),
            actual: x.len(),
        });
    }
    let mut y = vec![0.0; x.len()];
    graph.apply(x, &mut y);
    Ok(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Target for `||M v - lambda v||_2`.
    pub tolerance: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Iterations without a new best residual before restarting from a fresh
    /// random vector.
    pub stagnation_window: usize,
    pub max_restarts: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tolerance: 1e-10,
            max_iter: 100_000,
            seed: 0,
            stagnation_window: 1000,
            max_restarts: 3,
        }
    }
}

impl EigenOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit vector, sign-normalized (see [`normalize_sign`]).
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Leading eigenpairs ordered by descending `|lambda|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: Vec<usize>,
    /// `1 - lambda_2 / d` with `lambda_2` the second largest eigenvalue, for
    /// `d`-regular graphs.
    pub gamma: Option<f64>,
    pub seed: u64,
    pub tolerance: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Largest,
    Smallest,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn project_out(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(x, b);
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= c * bi;
            }
        }
    }
}

/// Flips `v` so that its largest-magnitude entry (lowest index among entries
/// within a relative `1e-6` of the maximum) is positive.
pub fn normalize_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    if let Some(&x) = v.iter().find(|x| x.abs() >= max * (1.0 - 1e-6)) {
        if x < 0.0 {
            v.iter_mut().for_each(|y| *y = -*y);
        }
    }
}

fn random_unit(dim: usize, deflate: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    for _ in 0..8 {
        let mut x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        project_out(&mut x, deflate);
        let nx = norm(&x);
        if nx > 1e-8 {
            x.iter_mut().for_each(|v| *v /= nx);
            return Some(x);
        }
    }
    None
}

struct Outcome {
    pair: EigenPair,
    converged: bool,
    best_residual: f64,
    best_estimate: f64,
}

fn iterate<O: SymmetricOperator + ?Sized>(
    op: &O,
    deflate: &[Vec<f64>],
    extreme: Extreme,
    opts: &EigenOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Outcome> {
    let n = op.dim();
    if deflate.len() >= n {
        return Err(Error::EmptyRange("no directions left after deflation"));
    }
    let shift = op.norm_bound().max(1.0);
    let s = match extreme {
        Extreme::Largest => 1.0,
        Extreme::Smallest => -1.0,
    };
    let mut x = random_unit(n, deflate, rng)
        .ok_or(Error::EmptyRange("deflation left a null complement"))?;
    let mut y = vec![0.0; n];
    let mut best_residual = f64::INFINITY;
    let mut best_estimate = f64::NAN;
    let mut last_improvement = 0usize;
    let mut restarts = 0usize;
    let mut theta = 0.0;
    let mut residual = f64::INFINITY;

    for it in 1..=opts.max_iter.max(1) {
        op.apply(&x, &mut y);
        theta = dot(&x, &y);
        residual = x
            .iter()
            .zip(&y)
            .map(|(xi, yi)| (yi - theta * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual < best_residual {
            best_residual = residual;
            best_estimate = theta;
            last_improvement = it;
        }
        if residual <= opts.tolerance {
            normalize_sign(&mut x);
            return Ok(Outcome {
                pair: EigenPair {
                    value: theta,
                    vector: x,
                    residual,
                    iterations: it,
                },
                converged: true,
                best_residual,
                best_estimate,
            });
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = s * yi + shift * *xi;
        }
        project_out(&mut x, deflate);
        let nx = norm(&x);
        let stalled = it - last_improvement >= opts.stagnation_window.max(1);
        if nx < 1e-300 || (stalled && restarts < opts.max_restarts) {
            restarts += 1;
            last_improvement = it;
            x = random_unit(n, deflate, rng)
                .ok_or(Error::EmptyRange("deflation left a null complement"))?;
        } else {
            x.iter_mut().for_each(|v| *v /= nx);
        }
    }
    normalize_sign(&mut x);
    Ok(Outcome {
        pair: EigenPair {
            value: theta,
            vector: x,
            residual,
            iterations: opts.max_iter,
        },
        converged: false,
        best_residual,
        best_estimate,
    })
}

/// Extreme eigenpair of `op` restricted to the orthogonal complement of the
/// (orthonormal) `deflate` vectors.
pub fn extreme_eigenpair<O: SymmetricOperator + ?Sized>(
    op: &O,
    deflate: &[Vec<f64>],
    extreme: Extreme,
    opts: &EigenOptions,
    stream: u64,
) -> Result<EigenPair> {
    let mut rng = component_rng(opts.seed, stream);
    let out = iterate(op, deflate, extreme, opts, &mut rng)?;
    if out.converged {
        Ok(out.pair)
    } else {
        Err(Error::Convergence {
            iterations: opts.max_iter,
            best_residual: out.best_residual,
            best_estimate: out.best_estimate,
        })
    }
}

/// Largest-magnitude eigenpair in the complement of `deflate`: both ends of
/// the spectrum are computed and the one with larger `|lambda|` is kept.
pub fn dominant_eigenpair<O: SymmetricOperator + ?Sized>(
    op: &O,
    deflate: &[Vec<f64>],
    opts: &EigenOptions,
    index: usize,
) -> Result<EigenPair> {
    let hi = extreme_eigenpair(op, deflate, Extreme::Largest, opts, 2 * index as u64)?;
    let lo = extreme_eigenpair(op, deflate, Extreme::Smallest, opts, 2 * index as u64 + 1)?;
    Ok(if lo.value.abs() > hi.value.abs() { lo } else { hi })
}

fn summary_from(pairs: Vec<EigenPair>, gamma: Option<f64>, opts: &EigenOptions) -> SpectrumSummary {
    SpectrumSummary {
        eigenvalues: pairs.iter().map(|p| p.value).collect(),
        residuals: pairs.iter().map(|p| p.residual).collect(),
        iterations: pairs.iter().map(|p| p.iterations).collect(),
        eigenvectors: pairs.into_iter().map(|p| p.vector).collect(),
        gamma,
        seed: opts.seed,
        tolerance: opts.tolerance,
        max_iter: opts.max_iter,
    }
}

/// `k` eigenpairs of a generic operator by descending `|lambda|`.
pub fn top_eigenpairs_op<O: SymmetricOperator + ?Sized>(
    op: &O,
    k: usize,
    opts: &EigenOptions,
) -> Result<SpectrumSummary> {
    if k > op.dim() {
        return Err(Error::InvalidGraph(format!(
            "requested {k} eigenpairs of a {}-dimensional operator",
            op.dim()
        )));
    }
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(k);
    for i in 0..k {
        let basis: Vec<Vec<f64>> = pairs.iter().map(|p| p.vector.clone()).collect();
        pairs.push(dominant_eigenpair(op, &basis, opts, i)?);
    }
    Ok(summary_from(pairs, None, opts))
}

/// `e / sqrt(N)` with its exact eigenvalue, when the graph is regular.
fn analytic_top_pair(graph: &Graph) -> Option<EigenPair> {
    let d = graph.regular_degree()?;
    let n = graph.num_vertices();
    let e = vec![1.0 / (n as f64).sqrt(); n];
    let ae = matvec(graph, &e).ok()?;
    let residual = norm(
        &ae.iter()
            .zip(&e)
            .map(|(a, b)| a - d as f64 * b)
            .collect::<Vec<_>>(),
    );
    Some(EigenPair {
        value: d as f64,
        vector: e,
        residual,
        iterations: 0,
    })
}

/// `k` adjacency eigenpairs by descending `|lambda|`.
///
/// For a regular graph the first pair is `(d, e / sqrt(N))`, checked by its
/// residual instead of iterated, and `gamma` is filled in from
/// [`second_eigenvector`].
pub fn top_eigenpairs(graph: &Graph, k: usize, opts: &EigenOptions) -> Result<SpectrumSummary> {
    if k > graph.num_vertices() {
        return Err(Error::InvalidGraph(format!(
            "requested {k} eigenpairs of a graph on {} vertices",
            graph.num_vertices()
        )));
    }
    let Some(first) = analytic_top_pair(graph) else {
        return top_eigenpairs_op(graph, k, opts);
    };
    let mut pairs = Vec::with_capacity(k);
    if k > 0 {
        pairs.push(first);
    }
    for i in 1..k {
        let basis: Vec<Vec<f64>> = pairs.iter().map(|p| p.vector.clone()).collect();
        pairs.push(dominant_eigenpair(graph, &basis, opts, i)?);
    }
    let gamma = spectral_gap(graph, opts).ok();
    Ok(summary_from(pairs, gamma, opts))
}

/// Second eigenpair of a regular graph and a multiplicity probe.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondEigen {
    pub lambda2: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    /// Estimate of the next eigenvalue below `lambda2` (a lower bound on it).
    pub next_estimate: f64,
    /// `lambda2` appears to have multiplicity > 1; `vector` is then an
    /// arbitrary unit vector of that eigenspace.
    pub degenerate: bool,
}

const PROBE_ITERATIONS: usize = 2000;

/// Largest eigenpair of `op` orthogonal to `top`, plus a bounded probe of the
/// following eigenvalue to flag a repeated `lambda2`.
pub fn second_eigenpair<O: SymmetricOperator + ?Sized>(
    op: &O,
    top: &[f64],
    opts: &EigenOptions,
) -> Result<SecondEigen> {
    let basis = vec![top.to_vec()];
    let second = extreme_eigenpair(op, &basis, Extreme::Largest, opts, 2)?;
    let mut next_estimate = f64::NEG_INFINITY;
    let mut degenerate = false;
    if op.dim() > 2 {
        let probe_opts = EigenOptions {
            max_iter: opts.max_iter.min(PROBE_ITERATIONS),
            max_restarts: 0,
            ..*opts
        };
        let basis = vec![top.to_vec(), second.vector.clone()];
        let mut rng = component_rng(opts.seed, 4);
        let probe = iterate(op, &basis, Extreme::Largest, &probe_opts, &mut rng)?;
        next_estimate = probe.pair.value;
        let scale = second.value.abs().max(1.0);
        degenerate = next_estimate >= second.value - 1e-6 * scale;
    }
    Ok(SecondEigen {
        lambda2: second.value,
        vector: second.vector,
        residual: second.residual,
        iterations: second.iterations,
        next_estimate,
        degenerate,
    })
}

/// Second largest adjacency eigenpair of a regular graph: power iteration on
/// the orthogonal complement of the constant vector.
pub fn second_eigenvector(graph: &Graph, opts: &EigenOptions) -> Result<SecondEigen> {
    if graph.regular_degree().is_none() {
        return Err(Error::InvalidGraph("second_eigenvector needs a regular graph".into()));
    }
    let n = graph.num_vertices();
    let e = vec![1.0 / (n as f64).sqrt(); n];
    second_eigenpair(graph, &e, opts)
}

/// `gamma = 1 - lambda_2 / d` for a `d`-regular graph.
pub fn spectral_gap(graph: &Graph, opts: &EigenOptions) -> Result<f64> {
    let d = graph
        .regular_degree()
        .ok_or_else(|| Error::InvalidGraph("spectral gap needs a regular graph".into()))?;
    if graph.num_vertices() < 2 || d == 0 {
        return Ok(0.0);
    }
    let s = second_eigenvector(graph, opts)?;
    Ok(1.0 - s.lambda2 / d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_single_edge() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(matvec(&g, &[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
        assert!(matches!(
            matvec(&g, &[1.0]),
            Err(Error::LengthMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn k4_spectrum() {
        let s = top_eigenpairs(&Graph::complete(4), 4, &EigenOptions::default()).unwrap();
        assert!((s.eigenvalues[0] - 3.0).abs() < 1e-12);
        for &l in &s.eigenvalues[1..] {
            assert!((l + 1.0).abs() < 1e-9, "{l}");
        }
        assert!((s.gamma.unwrap() - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn two_k4_components() {
        let g = Graph::complete(4).disjoint_union(&Graph::complete(4));
        let s = second_eigenvector(&g, &EigenOptions::default()).unwrap();
        assert!((s.lambda2 - 3.0).abs() < 1e-9);
        let v = &s.vector;
        for i in 0..4 {
            assert!((v[i] - v[0]).abs() < 1e-8);
            assert!((v[4 + i] - v[4]).abs() < 1e-8);
        }
        assert!((v[0] + v[4]).abs() < 1e-8);
        assert!(!s.degenerate);
        assert!(spectral_gap(&g, &EigenOptions::default()).unwrap().abs() < 1e-9);
    }

    #[test]
    fn cycle_six_has_degenerate_second_eigenvalue() {
        // C6 spectrum: 2, 1, 1, -1, -1, -2
        let s = second_eigenvector(&Graph::cycle(6), &EigenOptions::default()).unwrap();
        assert!((s.lambda2 - 1.0).abs() < 1e-9);
        assert!(s.degenerate);
        // K_{3,3}: 3, 0 (x4), -3
        let s = second_eigenvector(&Graph::complete_bipartite(3, 3), &EigenOptions::default())
            .unwrap();
        assert!(s.lambda2.abs() < 1e-9);
        assert!(s.degenerate);
    }

    #[test]
    fn convergence_error_carries_best_residual() {
        let opts = EigenOptions::default().with_max_iter(3).with_tolerance(1e-300);
        let g = Graph::cycle(50);
        match second_eigenvector(&g, &opts) {
            Err(Error::Convergence {
                iterations,
                best_residual,
                ..
            }) => {
                assert_eq!(iterations, 3);
                assert!(best_residual.is_finite() && best_residual > 0.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn sign_normalization() {
        let mut v = vec![0.1, -0.5, 0.5];
        normalize_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.5, -0.5]);
    }
}
