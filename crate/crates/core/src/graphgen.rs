//! Samplers for regular graphs and planted RSBM instances.
//!
//! Two constructions are available: the configuration model (uniform
//! perfect matching of half-edges) and the permutation model (a random
//! `n`-lift of the two-vertex base multigraph with `d2` parallel edges and
//! `d1/2` loops at each vertex).
//!
//! Simplicity is enforced either by whole-graph rejection, which is exact but
//! only practical for small degrees, or by incremental pairing: half-edge
//! pairs (or permutation entries) are drawn uniformly and kept only when they
//! do not create a loop or a repeated edge, restarting when no admissible
//! pair is left. [`Pairing::Auto`] chooses per component from the predicted
//! acceptance probability.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`. The
//! components of an instance use separate streams: 0 for side A, 1 for side
//! B, 2 for the cross edges and 3 for the final vertex relabeling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphViolation, Labeling};
use crate::model::{bipartite_simple_probability, config_simple_probability, RsbmParams};

pub const DEFAULT_MAX_REJECTS: usize = 1000;

/// Acceptance probability below which [`Pairing::Auto`] switches from
/// rejection to incremental pairing.
pub const AUTO_REJECTION_FLOOR: f64 = 0.01;

const STREAM_SIDE_A: u64 = 0;
const STREAM_SIDE_B: u64 = 1;
const STREAM_CROSS: u64 = 2;
const STREAM_RELABEL: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Configuration,
    Permutation,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Configuration => "configuration",
            SamplerKind::Permutation => "permutation",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "configuration" | "config" => Some(SamplerKind::Configuration),
            "permutation" | "lift" => Some(SamplerKind::Permutation),
            _ => None,
        }
    }
}

/// How simplicity of a sampled component is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// Draw the whole matching (or permutation set), reject if not simple.
    Rejection,
    /// Draw admissible pairs one at a time, restart when stuck.
    Incremental,
    /// Rejection when the predicted acceptance is at least
    /// [`AUTO_REJECTION_FLOOR`], incremental otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerOptions {
    pub pairing: Pairing,
    /// Rejections (or restarts) allowed per component.
    pub max_rejects: usize,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions {
            pairing: Pairing::Auto,
            max_rejects: DEFAULT_MAX_REJECTS,
        }
    }
}

impl Pairing {
    fn resolve(self, predicted_acceptance: f64) -> Pairing {
        match self {
            Pairing::Auto if predicted_acceptance >= AUTO_REJECTION_FLOOR => Pairing::Rejection,
            Pairing::Auto => Pairing::Incremental,
            other => other,
        }
    }
}

/// A sampled graph together with its planted partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedInstance {
    pub graph: Graph,
    /// The planted partition sigma.
    pub labels: Labeling,
    pub params: RsbmParams,
    pub seed: u64,
    pub sampler: SamplerKind,
    /// Canonical vertex `v` (side A is `0..n`, side B is `n..2n`) was renamed
    /// `relabeling[v]`.
    pub relabeling: Vec<usize>,
    /// Construction attempts summed over components (1 per component when
    /// nothing was rejected).
    pub attempts: usize,
}

pub fn component_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_regular_feasible(n: usize, d: usize) -> Result<()> {
    if (n * d) % 2 != 0 {
        return Err(Error::InvalidParams(format!(
            "n*d = {}*{} is odd (half-edge parity)",
            n, d
        )));
    }
    if d >= n && d > 0 {
        return Err(Error::InvalidParams(format!(
            "d = {d} must be < n = {n} for a simple d-regular graph"
        )));
    }
    Ok(())
}

fn check_bipartite_feasible(n: usize, d: usize) -> Result<()> {
    if d > n {
        return Err(Error::InvalidParams(format!(
            "d = {d} must be <= n = {n} for a simple d-regular bipartite graph"
        )));
    }
    Ok(())
}

fn adjacency_to_graph(adj: Vec<Vec<usize>>) -> Graph {
    Graph::from_adjacency_unchecked(adj)
}

/// One configuration-model draw: half-edges are matched by the exploration
/// process (pair the first unmatched half-edge with a uniform unmatched
/// one). Returns `None` as soon as a loop or repeated edge appears.
pub fn try_regular_config<R: Rng>(n: usize, d: usize, rng: &mut R) -> Option<Graph> {
    let m = n * d;
    let mut pts: Vec<usize> = (0..m).map(|i| i / d.max(1)).collect();
    let mut adj = vec![Vec::with_capacity(d); n];
    let mut i = 0;
    while i + 1 < m {
        let j = rng.gen_range(i + 1..m);
        pts.swap(i + 1, j);
        let (u, v) = (pts[i], pts[i + 1]);
        if u == v || adj[u].contains(&v) {
            return None;
        }
        adj[u].push(v);
        adj[v].push(u);
        i += 2;
    }
    Some(adjacency_to_graph(adj))
}

/// One bipartite configuration-model draw on sides `0..n` and `n..2n`.
pub fn try_bipartite_config<R: Rng>(n: usize, d: usize, rng: &mut R) -> Option<Graph> {
    let m = n * d;
    let mut right: Vec<usize> = (0..m).map(|i| n + i / d.max(1)).collect();
    let mut adj = vec![Vec::with_capacity(d); 2 * n];
    for i in 0..m {
        let j = rng.gen_range(i..m);
        right.swap(i, j);
        let (u, v) = (i / d, right[i]);
        if adj[u].contains(&v) {
            return None;
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    Some(adjacency_to_graph(adj))
}

/// Uniform simple `d`-regular graph on `n` vertices by whole-graph
/// rejection. Deterministic in `seed`.
pub fn sample_regular_config(n: usize, d: usize, seed: u64, max_rejects: usize) -> Result<Graph> {
    let opts = SamplerOptions {
        pairing: Pairing::Rejection,
        max_rejects,
    };
    sample_regular(n, d, &mut component_rng(seed, STREAM_SIDE_A), &opts).map(|(g, _)| g)
}

/// Uniform simple `d`-regular bipartite graph on `2n` vertices (sides
/// `0..n`, `n..2n`) by whole-graph rejection.
pub fn sample_bipartite_config(
    n: usize,
    d: usize,
    seed: u64,
    max_rejects: usize,
) -> Result<Graph> {
    let opts = SamplerOptions {
        pairing: Pairing::Rejection,
        max_rejects,
    };
    sample_bipartite(n, d, &mut component_rng(seed, STREAM_CROSS), &opts).map(|(g, _)| g)
}

/// Simple `d`-regular graph on `n` vertices with the configured pairing.
/// Returns the graph and the number of attempts used.
pub fn sample_regular<R: Rng>(
    n: usize,
    d: usize,
    rng: &mut R,
    opts: &SamplerOptions,
) -> Result<(Graph, usize)> {
    check_regular_feasible(n, d)?;
    let budget = opts.max_rejects.max(1);
    match opts.pairing.resolve(config_simple_probability(d)) {
        Pairing::Rejection => {
            for attempt in 1..=budget {
                if let Some(g) = try_regular_config(n, d, rng) {
                    return Ok((g, attempt));
                }
            }
            Err(Error::SamplingFailure {
                what: format!("simple {d}-regular graph on {n} vertices (rejection)"),
                attempts: budget,
            })
        }
        _ => {
            for attempt in 1..=budget {
                if let Some(adj) = incremental_regular(n, d, rng) {
                    return Ok((adjacency_to_graph(adj), attempt));
                }
            }
            Err(Error::SamplingFailure {
                what: format!("simple {d}-regular graph on {n} vertices (incremental)"),
                attempts: budget,
            })
        }
    }
}

/// Simple `d`-regular bipartite graph on `2n` vertices with the configured
/// pairing.
pub fn sample_bipartite<R: Rng>(
    n: usize,
    d: usize,
    rng: &mut R,
    opts: &SamplerOptions,
) -> Result<(Graph, usize)> {
    check_bipartite_feasible(n, d)?;
    let budget = opts.max_rejects.max(1);
    match opts.pairing.resolve(bipartite_simple_probability(d)) {
        Pairing::Rejection => {
            for attempt in 1..=budget {
                if let Some(g) = try_bipartite_config(n, d, rng) {
                    return Ok((g, attempt));
                }
            }
            Err(Error::SamplingFailure {
                what: format!("simple {d}-regular bipartite graph on 2x{n} vertices (rejection)"),
                attempts: budget,
            })
        }
        _ => {
            for attempt in 1..=budget {
                if let Some(adj) = incremental_bipartite(n, d, rng) {
                    return Ok((adjacency_to_graph(adj), attempt));
                }
            }
            Err(Error::SamplingFailure {
                what: format!(
                    "simple {d}-regular bipartite graph on 2x{n} vertices (incremental)"
                ),
                attempts: budget,
            })
        }
    }
}

fn stuck_threshold(remaining: usize) -> usize {
    64 + 2 * remaining
}

/// One incremental pairing run; `None` when no admissible pair remains.
fn incremental_regular<R: Rng>(n: usize, d: usize, rng: &mut R) -> Option<Vec<Vec<usize>>> {
    let mut pts: Vec<usize> = (0..n * d).map(|i| i / d.max(1)).collect();
    let mut adj = vec![Vec::with_capacity(d); n];
    let mut fails = 0usize;
    while !pts.is_empty() {
        let m = pts.len();
        if m < 2 {
            return None;
        }
        let i = rng.gen_range(0..m);
        let mut j = rng.gen_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let (u, v) = (pts[i], pts[j]);
        if u != v && !adj[u].contains(&v) {
            adj[u].push(v);
            adj[v].push(u);
            pts.swap_remove(i.max(j));
            pts.swap_remove(i.min(j));
            fails = 0;
        } else {
            fails += 1;
            if fails >= stuck_threshold(m) {
                let any = (0..m).any(|a| {
                    (a + 1..m).any(|b| pts[a] != pts[b] && !adj[pts[a]].contains(&pts[b]))
                });
                if !any {
                    return None;
                }
                fails = 0;
            }
        }
    }
    Some(adj)
}

fn incremental_bipartite<R: Rng>(n: usize, d: usize, rng: &mut R) -> Option<Vec<Vec<usize>>> {
    let mut left: Vec<usize> = (0..n * d).map(|i| i / d.max(1)).collect();
    let mut right: Vec<usize> = (0..n * d).map(|i| n + i / d.max(1)).collect();
    let mut adj = vec![Vec::with_capacity(d); 2 * n];
    let mut fails = 0usize;
    while !left.is_empty() {
        let m = left.len();
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(0..m);
        let (u, v) = (left[i], right[j]);
        if !adj[u].contains(&v) {
            adj[u].push(v);
            adj[v].push(u);
            left.swap_remove(i);
            right.swap_remove(j);
            fails = 0;
        } else {
            fails += 1;
            if fails >= stuck_threshold(m) {
                let any = left
                    .iter()
                    .any(|&a| right.iter().any(|&b| !adj[a].contains(&b)));
                if !any {
                    return None;
                }
                fails = 0;
            }
        }
    }
    Some(adj)
}

/// Checks the structural conditions a configuration-model RSBM needs:
/// `n >= 1`, `n d1` even, `d1 < n`, `d2 <= n`.
fn check_rsbm_feasible(params: &RsbmParams) -> Result<()> {
    if params.n == 0 {
        return Err(Error::InvalidParams("n >= 1 is required".into()));
    }
    check_regular_feasible(params.n, params.d1)?;
    check_bipartite_feasible(params.n, params.d2)
}

/// Planted instance from the configuration model with default options.
pub fn sample_rsbm(params: &RsbmParams, seed: u64) -> Result<PlantedInstance> {
    sample_rsbm_with(params, seed, &SamplerOptions::default())
}

/// Planted instance from the configuration model: two independent
/// `d1`-regular graphs on the sides and a `d2`-regular bipartite graph
/// across, followed by a uniform relabeling of all `2n` vertices.
pub fn sample_rsbm_with(
    params: &RsbmParams,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<PlantedInstance> {
    check_rsbm_feasible(params)?;
    let n = params.n;
    let (side_a, att_a) = sample_regular(n, params.d1, &mut component_rng(seed, STREAM_SIDE_A), opts)?;
    let (side_b, att_b) = sample_regular(n, params.d1, &mut component_rng(seed, STREAM_SIDE_B), opts)?;
    let (cross, att_c) = sample_bipartite(n, params.d2, &mut component_rng(seed, STREAM_CROSS), opts)?;

    let within = side_a.disjoint_union(&side_b);
    let mut adj: Vec<Vec<usize>> = within.adjacency().to_vec();
    for (v, nbrs) in cross.adjacency().iter().enumerate() {
        adj[v].extend_from_slice(nbrs);
    }
    Ok(finish_instance(
        adj,
        params,
        seed,
        SamplerKind::Configuration,
        att_a + att_b + att_c,
    ))
}

fn finish_instance(
    canonical: Vec<Vec<usize>>,
    params: &RsbmParams,
    seed: u64,
    sampler: SamplerKind,
    attempts: usize,
) -> PlantedInstance {
    let n = params.n;
    let mut relabeling: Vec<usize> = (0..2 * n).collect();
    relabeling.shuffle(&mut component_rng(seed, STREAM_RELABEL));
    let graph = Graph::from_adjacency_unchecked(canonical).relabeled(&relabeling);
    let mut signs = vec![-1i8; 2 * n];
    for v in 0..n {
        signs[relabeling[v]] = 1;
    }
    PlantedInstance {
        graph,
        labels: Labeling::new(signs).expect("signs are +-1"),
        params: *params,
        seed,
        sampler,
        relabeling,
        attempts,
    }
}

/// Log of the predicted probability that a uniform lift is simple.
fn lift_ln_acceptance(d1: usize, d2: usize) -> f64 {
    let k = (d1 / 2) as f64;
    let within = 1.5 * k + k * (k - 1.0);
    let cross = (d2 * d2.saturating_sub(1)) as f64 / 2.0;
    -(2.0 * within + cross)
}

/// Planted instance from the permutation model with default options.
pub fn sample_lift(params: &RsbmParams, seed: u64) -> Result<PlantedInstance> {
    sample_lift_with(params, seed, &SamplerOptions::default())
}

/// Random `n`-lift of the two-vertex base multigraph: `d1/2` permutations per
/// side give the edges `(i, pi(i))` inside the side, `d2` permutations give
/// the cross edges `(i, n + pi'(i))`. Labels are the two fibers (then
/// relabeled uniformly, as for the configuration sampler).
pub fn sample_lift_with(
    params: &RsbmParams,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<PlantedInstance> {
    if params.d1 % 2 != 0 {
        return Err(Error::InvalidParams(format!(
            "the permutation model needs d1 even (d1 = {}); lifting the base \
             multigraph uses d1/2 loops per vertex",
            params.d1
        )));
    }
    if params.n == 0 {
        return Err(Error::InvalidParams("n >= 1 is required".into()));
    }
    let n = params.n;
    let budget = opts.max_rejects.max(1);
    let pairing = opts.pairing.resolve(lift_ln_acceptance(params.d1, params.d2).exp());
    let mut rngs = [
        component_rng(seed, STREAM_SIDE_A),
        component_rng(seed, STREAM_SIDE_B),
        component_rng(seed, STREAM_CROSS),
    ];

    let (adj, attempts) = match pairing {
        Pairing::Rejection => lift_by_rejection(params, &mut rngs, budget)?,
        _ => lift_incremental(params, &mut rngs, budget)?,
    };
    debug_assert_eq!(adj.len(), 2 * n);
    Ok(finish_instance(
        adj,
        params,
        seed,
        SamplerKind::Permutation,
        attempts,
    ))
}

/// Adds the edges of permutation `perm` to `adj`; returns false on a loop or
/// a repeated edge. `offset_from`/`offset_to` place domain and image.
fn add_perm_edges(
    adj: &mut [Vec<usize>],
    perm: &[usize],
    offset_from: usize,
    offset_to: usize,
) -> bool {
    for (i, &t) in perm.iter().enumerate() {
        let (u, v) = (i + offset_from, t + offset_to);
        if u == v || adj[u].contains(&v) {
            return false;
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    true
}

fn lift_by_rejection(
    params: &RsbmParams,
    rngs: &mut [ChaCha8Rng; 3],
    budget: usize,
) -> Result<(Vec<Vec<usize>>, usize)> {
    let n = params.n;
    let k = params.d1 / 2;
    'attempt: for attempt in 1..=budget {
        let mut adj = vec![Vec::new(); 2 * n];
        for (side, offset) in [(0usize, 0usize), (1, n)] {
            for _ in 0..k {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rngs[side]);
                if !add_perm_edges(&mut adj, &perm, offset, offset) {
                    continue 'attempt;
                }
            }
        }
        for _ in 0..params.d2 {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rngs[2]);
            if !add_perm_edges(&mut adj, &perm, 0, n) {
                continue 'attempt;
            }
        }
        return Ok((adj, attempt));
    }
    Err(Error::SamplingFailure {
        what: format!(
            "simple lift for (n={}, d1={}, d2={}) (rejection)",
            params.n, params.d1, params.d2
        ),
        attempts: budget,
    })
}

/// Builds one permutation entry by entry, each time drawing a uniform
/// unassigned domain point and a uniform unused image that keep the graph
/// simple. `None` when stuck.
fn incremental_perm<R: Rng>(
    adj: &mut [Vec<usize>],
    n: usize,
    offset_from: usize,
    offset_to: usize,
    rng: &mut R,
) -> Option<()> {
    let mut domain: Vec<usize> = (0..n).collect();
    let mut images: Vec<usize> = (0..n).collect();
    let mut fails = 0usize;
    while !domain.is_empty() {
        let m = domain.len();
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(0..m);
        let (u, v) = (domain[i] + offset_from, images[j] + offset_to);
        if u != v && !adj[u].contains(&v) {
            adj[u].push(v);
            adj[v].push(u);
            domain.swap_remove(i);
            images.swap_remove(j);
            fails = 0;
        } else {
            fails += 1;
            if fails >= stuck_threshold(m) {
                let any = domain.iter().any(|&a| {
                    images.iter().any(|&b| {
                        let (u, v) = (a + offset_from, b + offset_to);
                        u != v && !adj[u].contains(&v)
                    })
                });
                if !any {
                    return None;
                }
                fails = 0;
            }
        }
    }
    Some(())
}

fn lift_incremental(
    params: &RsbmParams,
    rngs: &mut [ChaCha8Rng; 3],
    budget: usize,
) -> Result<(Vec<Vec<usize>>, usize)> {
    let n = params.n;
    let mut adj = vec![Vec::new(); 2 * n];
    let mut attempts = 0usize;
    let mut restarts = 0usize;
    let mut plan: Vec<(usize, usize, usize)> = Vec::new();
    for _ in 0..params.d1 / 2 {
        plan.push((0, 0, 0));
    }
    for _ in 0..params.d1 / 2 {
        plan.push((1, n, n));
    }
    for _ in 0..params.d2 {
        plan.push((2, 0, n));
    }
    for (stream, from, to) in plan {
        loop {
            attempts += 1;
            let snapshot = adj.clone();
            if incremental_perm(&mut adj, n, from, to, &mut rngs[stream]).is_some() {
                break;
            }
            adj = snapshot;
            restarts += 1;
            if restarts >= budget {
                return Err(Error::SamplingFailure {
                    what: format!(
                        "simple lift for (n={}, d1={}, d2={}) (incremental)",
                        params.n, params.d1, params.d2
                    ),
                    attempts,
                });
            }
        }
    }
    Ok((adj, attempts))
}

/// Samples with the requested model.
pub fn sample_instance(
    params: &RsbmParams,
    seed: u64,
    sampler: SamplerKind,
    opts: &SamplerOptions,
) -> Result<PlantedInstance> {
    match sampler {
        SamplerKind::Configuration => sample_rsbm_with(params, seed, opts),
        SamplerKind::Permutation => sample_lift_with(params, seed, opts),
    }
}

/// A violated instance invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceViolation {
    Graph(GraphViolation),
    VertexCount { expected: usize, actual: usize },
    LabelLength { expected: usize, actual: usize },
    DegreeRegularity { v: usize, degree: usize, expected: usize },
    LabelBalance { positive: usize, negative: usize },
    SameLabelDegree { v: usize, count: usize, expected: usize },
    CrossLabelDegree { v: usize, count: usize, expected: usize },
}

impl InstanceViolation {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceViolation::Graph(g) => g.name(),
            InstanceViolation::VertexCount { .. } => "vertex-count",
            InstanceViolation::LabelLength { .. } => "label-length",
            InstanceViolation::DegreeRegularity { .. } => "degree-regularity",
            InstanceViolation::LabelBalance { .. } => "label-balance",
            InstanceViolation::SameLabelDegree { .. } => "same-label-degree",
            InstanceViolation::CrossLabelDegree { .. } => "cross-label-degree",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceAudit {
    pub violations: Vec<InstanceViolation>,
}

impl InstanceAudit {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn names(&self) -> Vec<&'static str> {
        let mut v: Vec<_> = self.violations.iter().map(|x| x.name()).collect();
        v.dedup();
        v
    }
}

/// Checks every graph and planted-instance invariant.
pub fn validate_instance(inst: &PlantedInstance) -> InstanceAudit {
    let p = &inst.params;
    let g = &inst.graph;
    let mut violations: Vec<InstanceViolation> =
        g.audit().into_iter().map(InstanceViolation::Graph).collect();
    let nv = 2 * p.n;
    if g.num_vertices() != nv {
        violations.push(InstanceViolation::VertexCount {
            expected: nv,
            actual: g.num_vertices(),
        });
    }
    if inst.labels.len() != g.num_vertices() {
        violations.push(InstanceViolation::LabelLength {
            expected: g.num_vertices(),
            actual: inst.labels.len(),
        });
        return InstanceAudit { violations };
    }
    let pos = inst.labels.count_positive();
    if pos != p.n || inst.labels.len() - pos != p.n {
        violations.push(InstanceViolation::LabelBalance {
            positive: pos,
            negative: inst.labels.len() - pos,
        });
    }
    for v in 0..g.num_vertices() {
        let degree = g.degree(v);
        if degree != p.d1 + p.d2 {
            violations.push(InstanceViolation::DegreeRegularity {
                v,
                degree,
                expected: p.d1 + p.d2,
            });
        }
        let sv = inst.labels.get(v);
        let same = g
            .neighbors(v)
            .iter()
            .filter(|&&u| u < inst.labels.len() && inst.labels.get(u) == sv)
            .count();
        if same != p.d1 {
            violations.push(InstanceViolation::SameLabelDegree {
                v,
                count: same,
                expected: p.d1,
            });
        }
        if degree - same != p.d2 {
            violations.push(InstanceViolation::CrossLabelDegree {
                v,
                count: degree - same,
                expected: p.d2,
            });
        }
    }
    InstanceAudit { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_is_the_only_cubic_graph_on_four_vertices() {
        for seed in 0..20 {
            let g = sample_regular_config(4, 3, seed, 10_000).unwrap();
            assert_eq!(g, Graph::complete(4));
        }
    }

    #[test]
    fn parity_violation() {
        let e = sample_regular_config(5, 3, 0, 10).unwrap_err();
        assert!(matches!(e, Error::InvalidParams(ref m) if m.contains("parity")), "{e}");
    }

    #[test]
    fn k33_is_the_only_cubic_bipartite_graph_on_3_plus_3() {
        for seed in 0..10 {
            let g = sample_bipartite_config(3, 3, seed, 10_000).unwrap();
            assert_eq!(g, Graph::complete_bipartite(3, 3));
        }
    }

    #[test]
    fn bipartite_d1_is_perfect_matching() {
        let g = sample_bipartite_config(4, 1, 3, 10).unwrap();
        assert_eq!(g.regular_degree(), Some(1));
        for (u, v) in g.edges() {
            assert!(u < 4 && v >= 4);
        }
    }

    #[test]
    fn bipartite_n50_d3() {
        let g = sample_bipartite_config(50, 3, 11, 1000).unwrap();
        assert_eq!(g.regular_degree(), Some(3));
        assert!(g.audit().is_empty());
        assert!(g.edges().all(|(u, v)| u < 50 && v >= 50));
    }

    #[test]
    fn sampling_failure_carries_attempt_count() {
        // Rejection is hopeless for a 10-regular graph on 12 vertices.
        let e = sample_regular_config(12, 10, 0, 25).unwrap_err();
        assert_eq!(
            e,
            Error::SamplingFailure {
                what: "simple 10-regular graph on 12 vertices (rejection)".into(),
                attempts: 25
            }
        );
    }

    #[test]
    fn incremental_regular_is_simple_and_regular() {
        let opts = SamplerOptions {
            pairing: Pairing::Incremental,
            max_rejects: 100,
        };
        for seed in 0..5 {
            let (g, _) = sample_regular(200, 10, &mut component_rng(seed, 0), &opts).unwrap();
            assert_eq!(g.regular_degree(), Some(10));
            assert!(g.audit().is_empty());
        }
        // dense corner: complete graph is forced
        let (g, _) = sample_regular(6, 5, &mut component_rng(1, 0), &opts).unwrap();
        assert_eq!(g, Graph::complete(6));
    }

    #[test]
    fn rsbm_instance_is_valid() {
        let p = RsbmParams::new(100, 10, 3).unwrap();
        let inst = sample_rsbm(&p, 1).unwrap();
        assert!(validate_instance(&inst).is_clean());
        assert_eq!(inst.graph.regular_degree(), Some(13));
    }

    #[test]
    fn rsbm_is_deterministic() {
        let p = RsbmParams::new(60, 6, 3).unwrap();
        let a = sample_rsbm(&p, 42).unwrap();
        let b = sample_rsbm(&p, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_rsbm(&p, 43).unwrap();
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn lift_requires_even_d1() {
        let e = sample_lift(&RsbmParams::unchecked(100, 11, 3), 0).unwrap_err();
        assert!(matches!(e, Error::InvalidParams(ref m) if m.contains("d1 even")));
    }

    #[test]
    fn lift_on_one_vertex_never_succeeds() {
        for pairing in [Pairing::Rejection, Pairing::Incremental] {
            let opts = SamplerOptions {
                pairing,
                max_rejects: 50,
            };
            let e = sample_lift_with(&RsbmParams::unchecked(1, 2, 3), 0, &opts).unwrap_err();
            assert!(matches!(e, Error::SamplingFailure { .. }), "{e}");
        }
    }

    #[test]
    fn lift_instance_is_valid() {
        let p = RsbmParams::unchecked(100, 10, 2);
        let inst = sample_lift(&p, 5).unwrap();
        assert_eq!(inst.sampler, SamplerKind::Permutation);
        assert!(validate_instance(&inst).is_clean());
    }

    #[test]
    fn lift_rejection_small_degrees() {
        let opts = SamplerOptions {
            pairing: Pairing::Rejection,
            max_rejects: 10_000,
        };
        let p = RsbmParams::unchecked(30, 2, 1);
        let inst = sample_lift_with(&p, 9, &opts).unwrap();
        assert!(validate_instance(&inst).is_clean());
    }

    #[test]
    fn audit_flags_deleted_edge_and_flipped_label() {
        let p = RsbmParams::new(20, 4, 3).unwrap();
        let inst = sample_rsbm(&p, 3).unwrap();
        let (u, v) = inst.graph.edges().next().unwrap();
        let mut broken = inst.clone();
        broken.graph = inst.graph.without_edge(u, v);
        assert!(validate_instance(&broken).names().contains(&"degree-regularity"));

        let mut flipped = inst.clone();
        flipped.labels.flip(0);
        let names = validate_instance(&flipped).names();
        assert!(names.contains(&"same-label-degree"));
        assert!(names.contains(&"cross-label-degree"));
        assert!(names.contains(&"label-balance"));
    }
}
