#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rsbm::Graph;

/// Erdos-Renyi graph with edge probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Counts simple paths with `l` edges by scanning every vertex sequence of
/// length `l + 1`.
pub fn brute_force_saw(graph: &Graph, l: usize) -> Vec<Vec<u32>> {
    let n = graph.num_vertices();
    let mut out = vec![vec![0u32; n]; n];
    let total = n.pow(l as u32 + 1);
    let mut seq = vec![0usize; l + 1];
    for code in 0..total {
        let mut c = code;
        for s in seq.iter_mut() {
            *s = c % n;
            c /= n;
        }
        let distinct = (0..=l).all(|i| (0..i).all(|j| seq[i] != seq[j]));
        let walk = (0..l).all(|i| graph.has_edge(seq[i], seq[i + 1]));
        if distinct && walk {
            out[seq[0]][seq[l]] += 1;
        }
    }
    out
}

/// Eigenvalues of the adjacency matrix in descending order.
pub fn dense_spectrum(graph: &Graph) -> Vec<f64> {
    let n = graph.num_vertices();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| graph.has_edge(i, j) as u8 as f64);
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

/// `(x_k, y_k)` for k = 1..=l: same-label and opposite-label counts at tree
/// distance k, by their own coupled recurrences.
pub fn xy_sequence(d1: i128, d2: i128, l: usize) -> Vec<(i128, i128)> {
    let mut out = vec![(d1, d2), (d1 * d1 + d2 * d2 - d1 - d2, 2 * d1 * d2)];
    let c = d1 + d2 - 1;
    while out.len() < l {
        let k = out.len();
        let (x1, y1) = out[k - 1];
        let (x2, y2) = out[k - 2];
        out.push((d1 * x1 + d2 * y1 - c * x2, d1 * y1 + d2 * x1 - c * y2));
    }
    out.truncate(l);
    out
}

/// All equipartition sides containing vertex 0, by scanning every subset.
pub fn naive_sides(num_vertices: usize) -> Vec<Vec<usize>> {
    (0u32..1 << num_vertices)
        .filter(|m| m & 1 == 1 && m.count_ones() as usize * 2 == num_vertices)
        .map(|m| (0..num_vertices).filter(|&v| m >> v & 1 == 1).collect())
        .collect()
}

pub fn cut_size(graph: &Graph, side: &[usize]) -> u64 {
    let mut inside = vec![false; graph.num_vertices()];
    for &v in side {
        inside[v] = true;
    }
    graph.edges().filter(|&(u, v)| inside[u] != inside[v]).count() as u64
}

pub fn induced_degrees_all(graph: &Graph, side: &[usize], d: usize) -> bool {
    let mut inside = vec![false; graph.num_vertices()];
    for &v in side {
        inside[v] = true;
    }
    (0..graph.num_vertices()).all(|v| {
        graph
            .neighbors(v)
            .iter()
            .filter(|&&u| inside[u] == inside[v])
            .count()
            == d
    })
}
