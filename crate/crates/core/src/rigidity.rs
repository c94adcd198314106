//! Exhaustive oracles over equipartitions and vertex subsets.
//!
//! Graphs are held as `u32` adjacency masks, so every scan is limited to at
//! most 32 vertices; the public budgets are tighter. Equipartitions are
//! canonicalized to the side containing vertex 0, which leaves
//! `C(2n - 1, n - 1)` candidates. Candidates are visited in colexicographic
//! order, split into contiguous chunks that run in parallel, and all reported
//! witnesses are the first ones in that order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Labeling};
use crate::graphgen::PlantedInstance;
use crate::model::ln_binomial;

/// Largest vertex count accepted by the equipartition scans.
pub const MAX_PARTITION_VERTICES: usize = 30;
/// Largest vertex count accepted by [`edge_expansion_check`].
pub const MAX_EXPANSION_VERTICES: usize = 24;
/// Cap on the number of minimizing partitions listed in a certificate.
pub const MAX_LISTED_PARTITIONS: usize = 1024;
/// Slack on the expansion inequality.
pub const EXPANSION_TOLERANCE: f64 = 1e-9;
/// A spectral gap at or below this is treated as zero.
pub const VACUOUS_GAP: f64 = 1e-12;

const CHUNK: u64 = 1 << 14;

fn binomial(m: u64, k: u64) -> u64 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k) as u128;
    let m = m as u128;
    (0..k).fold(1u128, |acc, i| acc * (m - i) / (i + 1)) as u64
}

/// Number of equipartitions examined for a graph on `num_vertices` vertices.
pub fn equipartition_count(num_vertices: usize) -> u64 {
    if num_vertices == 0 || num_vertices % 2 == 1 {
        return 0;
    }
    binomial(num_vertices as u64 - 1, num_vertices as u64 / 2 - 1)
}

struct Masks {
    n: usize,
    adj: Vec<u32>,
    full: u32,
}

impl Masks {
    fn new(graph: &Graph) -> Masks {
        let n = graph.num_vertices();
        let adj = (0..n)
            .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
            .collect();
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        Masks { n, adj, full }
    }

    #[inline]
    fn inside_degree(&self, v: usize, side: u32) -> u32 {
        let own = if side >> v & 1 == 1 { side } else { self.full & !side };
        (self.adj[v] & own).count_ones()
    }

    fn sides_regular(&self, side: u32, d1: u32) -> bool {
        (0..self.n).all(|v| self.inside_degree(v, side) == d1)
    }

    fn cut(&self, side: u32) -> u64 {
        let other = self.full & !side;
        let mut s = side;
        let mut cut = 0u64;
        while s != 0 {
            let v = s.trailing_zeros() as usize;
            cut += (self.adj[v] & other).count_ones() as u64;
            s &= s - 1;
        }
        cut
    }
}

fn check_partition_budget(num_vertices: usize) -> Result<()> {
    if num_vertices > MAX_PARTITION_VERTICES {
        return Err(Error::Budget {
            what: format!(
                "equipartition scan on {num_vertices} vertices (at most {MAX_PARTITION_VERTICES})"
            ),
            estimated: ln_binomial(num_vertices as u64 - 1, num_vertices as u64 / 2 - 1)
                .exp()
                .min(u128::MAX as f64) as u128,
            limit: equipartition_count(MAX_PARTITION_VERTICES) as u128,
        });
    }
    if num_vertices == 0 || num_vertices % 2 == 1 {
        return Err(Error::InvalidGraph(format!(
            "equipartitions need an even, positive vertex count, got {num_vertices}"
        )));
    }
    Ok(())
}

/// The `rank`-th `k`-subset of bit positions in colexicographic order.
fn unrank_colex(mut rank: u64, k: usize) -> u32 {
    let mut mask = 0u32;
    for i in (1..=k as u64).rev() {
        let mut c = i - 1;
        while binomial(c + 1, i) <= rank {
            c += 1;
        }
        mask |= 1 << c;
        rank -= binomial(c, i);
    }
    mask
}

#[inline]
fn next_combination(x: u32) -> u32 {
    let c = x & x.wrapping_neg();
    let r = x.wrapping_add(c);
    (((r ^ x) >> 2) / c) | r
}

/// Every equipartition side containing vertex 0, in colex order of the
/// remaining members, paired with its rank.
fn equipartitions(num_vertices: usize) -> impl IndexedParallelIterator<Item = Vec<(u64, u32)>> {
    let total = equipartition_count(num_vertices);
    let k = num_vertices / 2 - 1;
    let chunks = total.div_ceil(CHUNK);
    (0..chunks as usize).into_par_iter().map(move |c| {
        let start = c as u64 * CHUNK;
        let end = (start + CHUNK).min(total);
        let mut sub = unrank_colex(start, k);
        let mut out = Vec::with_capacity((end - start) as usize);
        for rank in start..end {
            out.push((rank, sub << 1 | 1));
            if k > 0 && rank + 1 < end {
                sub = next_combination(sub);
            }
        }
        out
    })
}

fn mask_to_vertices(mask: u32) -> Vec<usize> {
    (0..32).filter(|&v| mask >> v & 1 == 1).collect()
}

fn labeling_side(labels: &Labeling) -> Result<u32> {
    if labels.len() > 32 {
        return Err(Error::InvalidLabeling("more than 32 vertices".into()));
    }
    let first = labels.get(0);
    Ok((0..labels.len())
        .filter(|&v| labels.get(v) == first)
        .fold(0u32, |m, v| m | 1 << v))
}

/// Canonical side (the one containing vertex 0) of a labeling, as a sorted
/// vertex list.
pub fn canonical_side(labels: &Labeling) -> Vec<usize> {
    let first = labels.as_slice().first().copied().unwrap_or(1);
    (0..labels.len()).filter(|&v| labels.get(v) == first).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    pub d1: usize,
    /// Sides (containing vertex 0) whose induced halves are both
    /// `d1`-regular.
    pub valid_partitions: Vec<Vec<usize>>,
    /// Exactly one valid partition, and it is the planted one.
    pub is_unique: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted_found: Option<bool>,
    pub checked_count: u64,
}

/// Scans all equipartitions for ones whose two sides both induce
/// `d1`-regular graphs.
pub fn regular_partitions(
    graph: &Graph,
    d1: usize,
    planted: Option<&Labeling>,
) -> Result<PartitionCertificate> {
    let nv = graph.num_vertices();
    check_partition_budget(nv)?;
    let planted_mask = match planted {
        Some(p) if p.len() != nv => {
            return Err(Error::LengthMismatch {
                expected: nv,
                actual: p.len(),
            })
        }
        Some(p) => Some(labeling_side(p)?),
        None => None,
    };
    let m = Masks::new(graph);
    let d1 = d1 as u32;
    let found: Vec<u32> = equipartitions(nv)
        .flat_map_iter(|chunk| {
            chunk
                .into_iter()
                .filter(|&(_, s)| m.sides_regular(s, d1))
                .map(|(_, s)| s)
                .collect::<Vec<_>>()
        })
        .collect();
    let planted_found = planted_mask.map(|p| found.contains(&p));
    let is_unique = found.len() == 1 && planted_mask.map_or(true, |p| found[0] == p);
    Ok(PartitionCertificate {
        d1: d1 as usize,
        valid_partitions: found.into_iter().map(mask_to_vertices).collect(),
        is_unique,
        planted_found,
        checked_count: equipartition_count(nv),
    })
}

/// [`regular_partitions`] against the instance's own planted labels.
pub fn enumerate_regular_partitions(inst: &PlantedInstance) -> Result<PartitionCertificate> {
    regular_partitions(&inst.graph, inst.params.d1, Some(&inst.labels))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisectionCertificate {
    pub min_cut: u64,
    /// The first [`MAX_LISTED_PARTITIONS`] minimizing sides.
    pub argmin_partitions: Vec<Vec<usize>>,
    pub argmin_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted_cut: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted_is_min: Option<bool>,
    pub checked_count: u64,
}

#[derive(Default)]
struct CutAcc {
    min: u64,
    masks: Vec<u32>,
    count: u64,
}

impl CutAcc {
    fn push(&mut self, cut: u64, mask: u32) {
        if self.count == 0 || cut < self.min {
            self.min = cut;
            self.masks.clear();
            self.count = 0;
        }
        if cut == self.min {
            self.count += 1;
            if self.masks.len() < MAX_LISTED_PARTITIONS {
                self.masks.push(mask);
            }
        }
    }

    fn merge(mut self, other: CutAcc) -> CutAcc {
        if other.count == 0 || (self.count != 0 && other.min > self.min) {
            return self;
        }
        if self.count == 0 || other.min < self.min {
            return other;
        }
        self.count += other.count;
        let room = MAX_LISTED_PARTITIONS - self.masks.len();
        self.masks.extend(other.masks.into_iter().take(room));
        self
    }
}

/// Exact minimum number of crossing edges over all equipartitions.
pub fn min_bisection_bruteforce(
    graph: &Graph,
    planted: Option<&Labeling>,
) -> Result<BisectionCertificate> {
    let nv = graph.num_vertices();
    check_partition_budget(nv)?;
    if let Some(p) = planted {
        if p.len() != nv {
            return Err(Error::LengthMismatch {
                expected: nv,
                actual: p.len(),
            });
        }
        if p.count_positive() * 2 != nv {
            return Err(Error::InvalidLabeling("planted labels are not balanced".into()));
        }
    }
    let m = Masks::new(graph);
    let acc = equipartitions(nv)
        .map(|chunk| {
            let mut acc = CutAcc::default();
            for (_, s) in chunk {
                acc.push(m.cut(s), s);
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(CutAcc::default(), CutAcc::merge);
    let planted_cut = planted.map(|p| labeling_side(p).map(|s| m.cut(s))).transpose()?;
    Ok(BisectionCertificate {
        min_cut: acc.min,
        argmin_partitions: acc.masks.into_iter().map(mask_to_vertices).collect(),
        argmin_count: acc.count,
        planted_cut,
        planted_is_min: planted_cut.map(|c| c == acc.min),
        checked_count: equipartition_count(nv),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    /// First witness side in scan order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    /// Equipartitions examined up to and including the witness.
    pub checked_count: u64,
    /// Why the scan was skipped, when it was.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub short_circuit: Option<String>,
}

/// Whether some equipartition has `d1`-regular sides and a `d2`-regular
/// bipartite cross graph.
pub fn rsbm_membership(graph: &Graph, d1: usize, d2: usize) -> Result<Membership> {
    let nv = graph.num_vertices();
    let skip = |why: String| Membership {
        member: false,
        witness: None,
        checked_count: 0,
        short_circuit: Some(why),
    };
    if let Some(v) = (0..nv).find(|&v| graph.degree(v) != d1 + d2) {
        return Ok(skip(format!(
            "vertex {v} has degree {} but d1 + d2 = {}",
            graph.degree(v),
            d1 + d2
        )));
    }
    check_partition_budget(nv)?;
    if d1 >= nv / 2 || d2 > nv / 2 {
        return Ok(skip(format!("degrees ({d1}, {d2}) do not fit sides of size {}", nv / 2)));
    }
    let m = Masks::new(graph);
    let hit = equipartitions(nv).find_map_first(|chunk| {
        chunk
            .into_iter()
            .find(|&(_, s)| m.sides_regular(s, d1 as u32))
    });
    Ok(match hit {
        Some((rank, s)) => Membership {
            member: true,
            witness: Some(mask_to_vertices(s)),
            checked_count: rank + 1,
            short_circuit: None,
        },
        None => Membership {
            member: false,
            witness: None,
            checked_count: equipartition_count(nv),
            short_circuit: None,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub gamma: f64,
    pub degree: usize,
    /// `gamma / 2`.
    pub bound: f64,
    /// Minimum of `|boundary(S)| / (d |S|)` over `0 < |S| <= N/2`.
    pub worst_ratio: f64,
    pub witness: Vec<usize>,
    pub violations: u64,
    pub vacuous: bool,
    pub checked_subsets: u64,
}

impl ExpansionReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `|boundary(S)| >= (gamma / 2) d |S|` for every nonempty `S` with at
/// most half the vertices.
pub fn edge_expansion_check(graph: &Graph, gamma: f64) -> Result<ExpansionReport> {
    let nv = graph.num_vertices();
    if nv > MAX_EXPANSION_VERTICES {
        return Err(Error::Budget {
            what: format!(
                "subset scan on {nv} vertices (at most {MAX_EXPANSION_VERTICES})"
            ),
            estimated: 1u128 << nv.min(127),
            limit: 1u128 << MAX_EXPANSION_VERTICES,
        });
    }
    if nv < 2 {
        return Err(Error::InvalidGraph("expansion needs at least two vertices".into()));
    }
    let d = graph
        .regular_degree()
        .ok_or_else(|| Error::InvalidGraph("expansion check needs a regular graph".into()))?;
    if d == 0 {
        return Err(Error::InvalidGraph("graph has no edges".into()));
    }
    let m = Masks::new(graph);
    let half = (nv / 2) as u32;
    let bound = gamma / 2.0;
    let total = 1u64 << nv;
    let chunks = total.div_ceil(CHUNK);
    // (boundary, size, mask, violations, checked)
    let per_chunk: Vec<(u64, u64, u32, u64, u64)> = (0..chunks as usize)
        .into_par_iter()
        .map(|c| {
            let c = c as u64;
            let mut best = (u64::MAX, 1u64, 0u32);
            let (mut violations, mut checked) = (0u64, 0u64);
            for s in (c * CHUNK).max(1)..((c + 1) * CHUNK).min(total) {
                let s = s as u32;
                let size = s.count_ones();
                if size > half {
                    continue;
                }
                checked += 1;
                let boundary = m.cut(s);
                let size = size as u64;
                let volume = (d as u64 * size) as f64;
                if (boundary as f64) + EXPANSION_TOLERANCE * volume < bound * volume {
                    violations += 1;
                }
                if (boundary as u128) * (best.1 as u128) < (best.0 as u128) * (size as u128) {
                    best = (boundary, size, s);
                }
            }
            (best.0, best.1, best.2, violations, checked)
        })
        .collect();
    let mut best = (u64::MAX, 1u64, 0u32);
    let (mut violations, mut checked) = (0u64, 0u64);
    for (b, s, mask, v, c) in per_chunk {
        violations += v;
        checked += c;
        if b != u64::MAX && (b as u128) * (best.1 as u128) < (best.0 as u128) * (s as u128) {
            best = (b, s, mask);
        }
    }
    Ok(ExpansionReport {
        gamma,
        degree: d,
        bound,
        worst_ratio: best.0 as f64 / (d as u64 * best.1) as f64,
        witness: mask_to_vertices(best.2),
        violations,
        vacuous: gamma <= VACUOUS_GAP,
        checked_subsets: checked,
    })
}
