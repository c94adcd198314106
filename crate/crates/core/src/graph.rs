//! Immutable simple graphs in adjacency-list form and ±1 labelings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected graph stored as per-vertex sorted neighbor lists.
///
/// Graphs built through [`Graph::from_edges`] are always simple and
/// symmetric. [`Graph::from_adjacency_unchecked`] accepts arbitrary lists so
/// that [`Graph::audit`] can be exercised on malformed input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

/// A structural defect found by [`Graph::audit`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphViolation {
    Asymmetric { u: usize, v: usize },
    SelfLoop { v: usize },
    RepeatedNeighbor { v: usize, u: usize },
    NeighborOutOfRange { v: usize, u: usize },
}

impl GraphViolation {
    pub fn name(&self) -> &'static str {
        match self {
            GraphViolation::Asymmetric { .. } => "symmetry",
            GraphViolation::SelfLoop { .. } => "no-self-loops",
            GraphViolation::RepeatedNeighbor { .. } => "no-repeated-neighbors",
            GraphViolation::NeighborOutOfRange { .. } => "neighbor-in-range",
        }
    }
}

impl Graph {
    /// Builds a simple graph from an undirected edge list, rejecting loops,
    /// repeated edges and out-of-range endpoints.
    pub fn from_edges(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); num_vertices];
        for &(u, v) in edges {
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {num_vertices} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (v, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "repeated edge ({v}, {})",
                    w[0]
                )));
            }
        }
        Ok(Graph { adjacency })
    }

    /// Wraps neighbor lists as given (each list is sorted, nothing else is
    /// checked).
    pub fn from_adjacency_unchecked(mut adjacency: Vec<Vec<usize>>) -> Self {
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Graph { adjacency }
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adjacency.first()?.len();
        self.adjacency.iter().all(|n| n.len() == d).then_some(d)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Copy of the graph with the edge `{u, v}` removed (no-op if absent).
    pub fn without_edge(&self, u: usize, v: usize) -> Graph {
        let mut adjacency = self.adjacency.clone();
        adjacency[u].retain(|&w| w != v);
        adjacency[v].retain(|&w| w != u);
        Graph { adjacency }
    }

    /// Vertex `v` of the result is vertex `perm^-1(v)` of `self`, i.e. old
    /// vertex `u` is renamed `perm[u]`.
    pub fn relabeled(&self, perm: &[usize]) -> Graph {
        let mut adjacency = vec![Vec::new(); self.num_vertices()];
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            adjacency[perm[u]] = nbrs.iter().map(|&w| perm[w]).collect();
        }
        Graph::from_adjacency_unchecked(adjacency)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.num_vertices()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.num_vertices();
        let mut adjacency = self.adjacency.clone();
        adjacency.extend(
            other
                .adjacency
                .iter()
                .map(|nbrs| nbrs.iter().map(|&w| w + off).collect()),
        );
        Graph { adjacency }
    }

    /// Stable 64-bit FNV-1a hash of the vertex count and sorted edge list.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        eat(self.num_vertices() as u64);
        for (u, v) in self.edges() {
            eat(u as u64);
            eat(v as u64);
        }
        h
    }

    pub fn audit(&self) -> Vec<GraphViolation> {
        let n = self.num_vertices();
        let mut out = Vec::new();
        for (v, nbrs) in self.adjacency.iter().enumerate() {
            for (i, &u) in nbrs.iter().enumerate() {
                if u >= n {
                    out.push(GraphViolation::NeighborOutOfRange { v, u });
                    continue;
                }
                if u == v {
                    out.push(GraphViolation::SelfLoop { v });
                }
                if i > 0 && nbrs[i - 1] == u {
                    out.push(GraphViolation::RepeatedNeighbor { v, u });
                }
                if !self.adjacency[u].contains(&v) {
                    out.push(GraphViolation::Asymmetric { u: v, v: u });
                }
            }
        }
        out
    }

    // Small reference graphs.

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::from_edges(n, &edges).expect("complete graph is simple")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let edges: Vec<_> = (0..a)
            .flat_map(|u| (0..b).map(move |v| (u, a + v)))
            .collect();
        Graph::from_edges(a + b, &edges).expect("complete bipartite graph is simple")
    }

    pub fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Graph::from_edges(n, &edges).expect("cycle with n >= 3 is simple")
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|u| (u - 1, u)).collect();
        Graph::from_edges(n, &edges).expect("path is simple")
    }
}

/// A ±1 sign per vertex. `+1` encodes community A, `-1` community B.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Labeling(Vec<i8>);

impl TryFrom<Vec<i8>> for Labeling {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        Labeling::new(v)
    }
}

impl From<Labeling> for Vec<i8> {
    fn from(l: Labeling) -> Self {
        l.0
    }
}

impl Labeling {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(i) = signs.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidLabeling(format!(
                "entry {i} is {}, expected +1 or -1",
                signs[i]
            )));
        }
        Ok(Labeling(signs))
    }

    /// `+1` on the first `n` vertices, `-1` on the remaining `n`.
    pub fn halves(n: usize) -> Self {
        let mut s = vec![1i8; n];
        s.extend(std::iter::repeat(-1i8).take(n));
        Labeling(s)
    }

    /// Sign rounding: strictly negative entries map to `-1`, everything else
    /// (zero included) to `+1`.
    pub fn from_signs_of(values: &[f64]) -> Self {
        Labeling(values.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect())
    }

    /// The `k` largest values map to `+1` (ties broken by lower index),
    /// everything else to `-1`.
    pub fn top_k(values: &[f64], k: usize) -> Self {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        let mut s = vec![-1i8; values.len()];
        for &i in idx.iter().take(k) {
            s[i] = 1;
        }
        Labeling(s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, v: usize) -> i8 {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn flip(&mut self, v: usize) {
        self.0[v] = -self.0[v];
    }

    pub fn negated(&self) -> Labeling {
        Labeling(self.0.iter().map(|&s| -s).collect())
    }

    pub fn count_positive(&self) -> usize {
        self.0.iter().filter(|&&s| s == 1).count()
    }

    /// Vertices labelled `+1`, ascending.
    pub fn positive_set(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.0[v] == 1).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&s| s as f64).collect()
    }

    /// Labeling with `+1` exactly on `set`.
    pub fn from_positive_set(len: usize, set: &[usize]) -> Self {
        let mut s = vec![-1i8; len];
        for &v in set {
            s[v] = 1;
        }
        Labeling(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_rejects_loops_and_repeats() {
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        let g = Graph::from_edges(3, &[(2, 0), (0, 1)]).unwrap();
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
        assert!(g.audit().is_empty());
    }

    #[test]
    fn audit_flags_defects() {
        let g = Graph::from_adjacency_unchecked(vec![vec![1, 1], vec![0], vec![2]]);
        let names: Vec<_> = g.audit().iter().map(|v| v.name()).collect();
        assert!(names.contains(&"no-repeated-neighbors"));
        assert!(names.contains(&"no-self-loops"));
        let g = Graph::from_adjacency_unchecked(vec![vec![1], vec![]]);
        assert_eq!(g.audit(), vec![GraphViolation::Asymmetric { u: 0, v: 1 }]);
    }

    #[test]
    fn reference_graphs() {
        assert_eq!(Graph::complete(4).regular_degree(), Some(3));
        assert_eq!(Graph::complete_bipartite(3, 3).num_edges(), 9);
        assert_eq!(Graph::cycle(10).regular_degree(), Some(2));
        assert_eq!(Graph::path(3).regular_degree(), None);
    }

    #[test]
    fn relabel_preserves_structure() {
        let g = Graph::path(4);
        let h = g.relabeled(&[3, 2, 1, 0]);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 3)]);
        let h = g.relabeled(&[1, 0, 3, 2]);
        assert!(h.has_edge(1, 0) && h.has_edge(0, 3) && h.has_edge(3, 2));
    }

    #[test]
    fn fingerprint_depends_on_edges() {
        let a = Graph::cycle(6);
        let b = a.without_edge(0, 1);
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), Graph::cycle(6).fingerprint());
    }

    #[test]
    fn labeling_validation_and_rounding() {
        assert!(Labeling::new(vec![1, 0]).is_err());
        let l = Labeling::from_signs_of(&[0.5, 0.0, -1e-300]);
        assert_eq!(l.as_slice(), &[1, 1, -1]);
        let l = Labeling::top_k(&[0.1, 0.3, 0.3, -1.0], 2);
        assert_eq!(l.as_slice(), &[-1, 1, 1, -1]);
        assert_eq!(Labeling::halves(2).as_slice(), &[1, 1, -1, -1]);
    }

    #[test]
    fn labeling_serde_rejects_zero() {
        assert!(serde_json::from_str::<Labeling>("[1,-1,0]").is_err());
        let l: Labeling = serde_json::from_str("[1,-1]").unwrap();
        assert_eq!(serde_json::to_string(&l).unwrap(), "[1,-1]");
    }
}
