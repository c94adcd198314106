//! Self-avoiding-walk matrices and tangle audits.
//!
//! `S^(l)[i][j]` counts the simple paths with `l` edges from `i` to `j`. On a
//! vertex whose radius-`l` ball is a tree, the row sum is the size of the
//! ball's boundary and the label-weighted row sum is `z_l` times the vertex's
//! own label.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Labeling};
use crate::spectral::{
    extreme_eigenpair, second_eigenpair, EigenOptions, Extreme, SymmetricOperator,
};

/// Default limit on the number of DFS path extensions in [`build_saw`].
pub const DEFAULT_WORK_BUDGET: u128 = 100_000_000;

/// Dense symmetric matrix of self-avoiding-walk counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SawMatrix {
    pub l: usize,
    dim: usize,
    counts: Vec<u32>,
    /// [`Graph::fingerprint`] of the source graph.
    pub built_from: u64,
}

impl SawMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.counts[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.row(i).iter().map(|&c| c as u64).sum()
    }

    pub fn max_entry(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn nonzeros(&self) -> usize {
        self.counts.iter().filter(|&&c| c != 0).count()
    }

    /// Writes a MatrixMarket coordinate file holding the lower triangle
    /// (1-based indices), with the walk length and source fingerprint in a
    /// comment line.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> Result<()> {
        let entries: Vec<(usize, usize, u32)> = (0..self.dim)
            .flat_map(|i| (0..=i).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let c = self.get(i, j);
                (c != 0).then_some((i, j, c))
            })
            .collect();
        writeln!(w, "%%MatrixMarket matrix coordinate integer symmetric")?;
        writeln!(w, "% saw l={} fingerprint={:016x}", self.l, self.built_from)?;
        writeln!(w, "{} {} {}", self.dim, self.dim, entries.len())?;
        for (i, j, c) in entries {
            writeln!(w, "{} {} {}", i + 1, j + 1, c)?;
        }
        Ok(())
    }

    pub fn read_matrix_market<R: BufRead>(r: R) -> Result<SawMatrix> {
        let mut l = None;
        let mut fp = 0u64;
        let mut dim = None;
        let mut counts = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let perr = |m: &str| Error::Parse {
                line: lineno,
                message: m.to_string(),
            };
            let t = line.trim();
            if t.is_empty() || t.starts_with("%%") {
                continue;
            }
            if let Some(rest) = t.strip_prefix('%') {
                for tok in rest.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("l=") {
                        l = Some(v.parse().map_err(|_| perr("bad l"))?);
                    } else if let Some(v) = tok.strip_prefix("fingerprint=") {
                        fp = u64::from_str_radix(v, 16).map_err(|_| perr("bad fingerprint"))?;
                    }
                }
                continue;
            }
            let f: Vec<&str> = t.split_whitespace().collect();
            if f.len() != 3 {
                return Err(perr("expected three fields"));
            }
            let nums: Vec<u64> = f
                .iter()
                .map(|s| s.parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| perr("non-integer field"))?;
            match dim {
                None => {
                    let d = nums[0] as usize;
                    dim = Some(d);
                    counts = vec![0u32; d * d];
                }
                Some(d) => {
                    let (i, j, c) = (nums[0] as usize, nums[1] as usize, nums[2] as u32);
                    if i == 0 || j == 0 || i > d || j > d {
                        return Err(perr("index out of range"));
                    }
                    counts[(i - 1) * d + (j - 1)] = c;
                    counts[(j - 1) * d + (i - 1)] = c;
                }
            }
        }
        let dim = dim.ok_or(Error::Parse {
            line: 0,
            message: "missing size line".into(),
        })?;
        Ok(SawMatrix {
            l: l.unwrap_or(0),
            dim,
            counts,
            built_from: fp,
        })
    }
}

impl SymmetricOperator for SawMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let d = self.dim;
        let row = |i: usize| -> f64 {
            self.counts[i * d..(i + 1) * d]
                .iter()
                .zip(x)
                .filter(|(&c, _)| c != 0)
                .map(|(&c, &xj)| c as f64 * xj)
                .sum()
        };
        if d >= 256 {
            y.par_iter_mut().enumerate().for_each(|(i, out)| *out = row(i));
        } else {
            y.iter_mut().enumerate().for_each(|(i, out)| *out = row(i));
        }
    }

    fn norm_bound(&self) -> f64 {
        (0..self.dim).map(|i| self.row_sum(i)).max().unwrap_or(0) as f64
    }
}

/// Upper bound on the number of path extensions a full enumeration performs:
/// `sum_v deg(v) (maxdeg - 1)^(l - 1)`.
pub fn estimated_work(graph: &Graph, l: usize) -> u128 {
    if l == 0 {
        return graph.num_vertices() as u128;
    }
    let branch = graph.max_degree().saturating_sub(1) as u128;
    let per = branch.saturating_pow((l - 1) as u32);
    (0..graph.num_vertices())
        .map(|v| (graph.degree(v) as u128).saturating_mul(per))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// Visits the endpoint of every simple path with `l` edges starting at
/// `root`.
fn for_each_saw_end<F: FnMut(usize)>(graph: &Graph, root: usize, l: usize, on_path: &mut [bool], f: &mut F) {
    fn go<F: FnMut(usize)>(g: &Graph, v: usize, left: usize, on_path: &mut [bool], f: &mut F) {
        if left == 0 {
            f(v);
            return;
        }
        on_path[v] = true;
        for &u in g.neighbors(v) {
            if !on_path[u] {
                go(g, u, left - 1, on_path, f);
            }
        }
        on_path[v] = false;
    }
    go(graph, root, l, on_path, f);
}

/// Row `root` of `S^(l)` as a dense vector.
pub fn saw_row(graph: &Graph, root: usize, l: usize) -> Vec<u32> {
    let mut row = vec![0u32; graph.num_vertices()];
    let mut on_path = vec![false; graph.num_vertices()];
    for_each_saw_end(graph, root, l, &mut on_path, &mut |j| row[j] += 1);
    row
}

/// `(sum_j S_vj, sum_j S_vj sigma_j)` for one vertex without building the
/// matrix.
pub fn saw_row_sums(graph: &Graph, v: usize, l: usize, labels: &Labeling) -> (u64, i64) {
    let mut on_path = vec![false; graph.num_vertices()];
    let (mut count, mut signed) = (0u64, 0i64);
    for_each_saw_end(graph, v, l, &mut on_path, &mut |j| {
        count += 1;
        signed += labels.get(j) as i64;
    });
    (count, signed)
}

/// Builds `S^(l)` by depth-first enumeration from every root.
pub fn build_saw(graph: &Graph, l: usize) -> Result<SawMatrix> {
    build_saw_with_budget(graph, l, DEFAULT_WORK_BUDGET)
}

pub fn build_saw_with_budget(graph: &Graph, l: usize, budget: u128) -> Result<SawMatrix> {
    if l == 0 {
        return Err(Error::EmptyRange("build_saw requires l >= 1"));
    }
    let estimated = estimated_work(graph, l);
    if estimated > budget {
        return Err(Error::Budget {
            what: format!("self-avoiding walks of length {l}"),
            estimated,
            limit: budget,
        });
    }
    let n = graph.num_vertices();
    let rows: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map_init(
            || vec![false; n],
            |on_path, root| {
                let mut row = vec![0u32; n];
                for_each_saw_end(graph, root, l, on_path, &mut |j| row[j] += 1);
                row
            },
        )
        .collect();
    Ok(SawMatrix {
        l,
        dim: n,
        counts: rows.concat(),
        built_from: graph.fingerprint(),
    })
}

/// Per-vertex cycle structure of radius-`l` balls.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangleAudit {
    pub l: usize,
    /// `E - V + 1` of the subgraph induced on `B_l(v)`.
    pub excess_per_vertex: Vec<usize>,
    /// Every ball contains at most one cycle.
    pub tangle_free: bool,
    /// Number of vertices whose ball contains a cycle.
    pub x_l: usize,
    /// Vertices whose ball is a tree.
    pub tree_vertices: Vec<usize>,
}

impl TangleAudit {
    pub fn max_excess(&self) -> usize {
        self.excess_per_vertex.iter().copied().max().unwrap_or(0)
    }

    /// `histogram[k]` = number of vertices with excess `k`.
    pub fn excess_histogram(&self) -> Vec<usize> {
        let mut h = vec![0usize; self.max_excess() + 1];
        for &e in &self.excess_per_vertex {
            h[e] += 1;
        }
        h
    }
}

struct BallScratch {
    dist: Vec<usize>,
    touched: Vec<usize>,
    queue: VecDeque<usize>,
}

impl BallScratch {
    fn new(n: usize) -> Self {
        BallScratch {
            dist: vec![usize::MAX; n],
            touched: Vec::new(),
            queue: VecDeque::new(),
        }
    }
}

fn ball_excess(graph: &Graph, v: usize, l: usize, s: &mut BallScratch) -> usize {
    s.dist[v] = 0;
    s.touched.push(v);
    s.queue.push_back(v);
    while let Some(u) = s.queue.pop_front() {
        let du = s.dist[u];
        if du == l {
            continue;
        }
        for &w in graph.neighbors(u) {
            if s.dist[w] == usize::MAX {
                s.dist[w] = du + 1;
                s.touched.push(w);
                s.queue.push_back(w);
            }
        }
    }
    let vertices = s.touched.len();
    let mut edges = 0usize;
    for &u in &s.touched {
        edges += graph
            .neighbors(u)
            .iter()
            .filter(|&&w| w > u && s.dist[w] != usize::MAX)
            .count();
    }
    for &u in &s.touched {
        s.dist[u] = usize::MAX;
    }
    s.touched.clear();
    // the ball is connected, so E >= V - 1
    edges + 1 - vertices
}

/// Ball excess at depth `l` for every vertex.
pub fn tangle_audit(graph: &Graph, l: usize) -> TangleAudit {
    let n = graph.num_vertices();
    let excess: Vec<usize> = (0..n)
        .into_par_iter()
        .map_init(|| BallScratch::new(n), |s, v| ball_excess(graph, v, l, s))
        .collect();
    let tangle_free = excess.iter().all(|&e| e <= 1);
    let x_l = excess.iter().filter(|&&e| e >= 1).count();
    let tree_vertices = (0..n).filter(|&v| excess[v] == 0).collect();
    TangleAudit {
        l,
        excess_per_vertex: excess,
        tangle_free,
        x_l,
        tree_vertices,
    }
}

/// `e' S e / N` and `sigma' S sigma / N`, with their integer numerators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForms {
    pub ee_numerator: i128,
    pub ss_numerator: i128,
    pub dim: usize,
    pub ee_form: f64,
    pub ss_form: f64,
}

pub fn saw_quadratic_forms(saw: &SawMatrix, labels: &Labeling) -> Result<QuadraticForms> {
    if labels.len() != saw.dim() {
        return Err(Error::LengthMismatch {
            expected: saw.dim(),
            actual: labels.len(),
        });
    }
    let mut ee = 0i128;
    let mut ss = 0i128;
    for i in 0..saw.dim() {
        let si = labels.get(i) as i128;
        for (j, &c) in saw.row(i).iter().enumerate() {
            if c != 0 {
                ee += c as i128;
                ss += si * labels.get(j) as i128 * c as i128;
            }
        }
    }
    let n = saw.dim() as f64;
    Ok(QuadraticForms {
        ee_numerator: ee,
        ss_numerator: ss,
        dim: saw.dim(),
        ee_form: ee as f64 / n,
        ss_form: ss as f64 / n,
    })
}

/// Top two eigenpairs of `S^(l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SawSpectrum {
    pub l: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub residuals: [f64; 2],
    pub iterations: [usize; 2],
}

/// Largest eigenpair of `S^(l)`, then the largest one orthogonal to it.
pub fn saw_spectrum(saw: &SawMatrix, opts: &EigenOptions) -> Result<SawSpectrum> {
    let first = extreme_eigenpair(saw, &[], Extreme::Largest, opts, 0)?;
    let second = second_eigenpair(saw, &first.vector, opts)?;
    Ok(SawSpectrum {
        l: saw.l,
        lambda1: first.value,
        lambda2: second.lambda2,
        v1: first.vector,
        v2: second.vector,
        residuals: [first.residual, second.residual],
        iterations: [first.iterations, second.iterations],
    })
}

/// Second eigenpair of `S^(l)` for the graph: the weak-recovery primitive.
pub fn saw_recover(graph: &Graph, l: usize, opts: &EigenOptions) -> Result<SawSpectrum> {
    let saw = build_saw(graph, l)?;
    saw_spectrum(&saw, opts)
}
