mod common;

use common::*;
use rsbm::graphgen::sample_rsbm;
use rsbm::model::{
    ln_support_fraction, roots, spectral_condition, tv_rates, z_sequence, DerivedQuantities,
};
use rsbm::rigidity::{edge_expansion_check, min_bisection_bruteforce, regular_partitions};
use rsbm::saw::build_saw;
use rsbm::spectral::{second_eigenvector, top_eigenpairs, EigenOptions};
use rsbm::{Graph, Labeling, RsbmParams};

#[test]
fn z_matches_xy_recurrence() {
    for d1 in 3..=12i128 {
        for d2 in 3..=d1 {
            let z = z_sequence(d1 as usize, d2 as usize, 20).unwrap();
            let xy = xy_sequence(d1, d2, 20);
            for k in 0..20 {
                assert_eq!(z[k], xy[k].0 - xy[k].1, "(d1={d1}, d2={d2}) k={}", k + 1);
            }
        }
    }
}

#[test]
fn xy_values_for_10_2() {
    let xy = xy_sequence(10, 2, 4);
    assert_eq!(xy[2], (890, 562));
    assert_eq!(z_sequence(10, 2, 4).unwrap(), vec![8, 52, 328, 2052]);
    // x_k + y_k counts the whole sphere of the 12-regular tree
    for (k, (x, y)) in xy.iter().enumerate() {
        assert_eq!(x + y, 12 * 11i128.pow(k as u32));
    }
}

#[test]
fn closed_form_constant_for_10_2() {
    let r = roots(10, 2).unwrap();
    let s5 = 5f64.sqrt();
    let alpha = 4.0 + s5;
    let beta = 4.0 - s5;
    let a = (52.0 - beta * 8.0) / (alpha * (alpha - beta));
    assert!((r.alpha - alpha).abs() < 1e-12);
    assert!((r.a_const - a).abs() < 1e-12);
    assert!((r.a_const - 1.3586).abs() < 1e-4);
}

#[test]
fn tv_rates_match_direct_evaluation() {
    let binom = |m: u64, k: u64| (0..k).fold(1f64, |a, i| a * (m - i) as f64 / (i + 1) as f64);
    for d1 in 3..=20u64 {
        for d2 in 3..=d1 {
            let d = d1 + d2;
            let c = binom(d, d1);
            let r1 = 2.0 * c / 2f64.powi(d as i32);
            let r2 = 2.0 * c * (d1 as f64).powi(d1 as i32) * (d2 as f64).powi(d2 as i32)
                / (d as f64).powi(d as i32);
            let (a, b) = tv_rates(d1 as usize, d2 as usize);
            assert!((a - r1).abs() <= 1e-12 * r1, "({d1}, {d2})");
            assert!((b - r2).abs() <= 1e-12 * r2, "({d1}, {d2})");
        }
    }
}

#[test]
fn support_fraction_decays_at_the_tv_rates() {
    for (d1, d2) in [(3u64, 3u64), (10, 2), (6, 3), (5, 4)] {
        let (r1, r2) = tv_rates(d1 as usize, d2 as usize);
        let target = r1.ln() + r2.ln();
        let n = 200_000u64;
        let per_n = ln_support_fraction(n, d1, d2) / n as f64;
        // the remainder is O(log n / n)
        assert!((per_n - target).abs() < 1e-3, "({d1}, {d2}): {per_n} vs {target}");
    }
}

#[test]
fn alpha_exceeds_bulk_scale() {
    for d1 in 3..=30usize {
        for d2 in 3..d1 {
            if spectral_condition(d1, d2) {
                let q = DerivedQuantities::compute(d1, d2);
                let a = q.alpha().unwrap();
                assert!(a > ((d1 + d2) as f64).sqrt());
                assert!(a < (d1 - d2) as f64);
            }
        }
    }
}

#[test]
fn saw_matches_exhaustive_enumeration() {
    for seed in 0..12u64 {
        let n = 6 + (seed as usize % 7);
        let g = random_graph(n, 0.45, seed);
        for l in 1..=4 {
            let brute = brute_force_saw(&g, l);
            let s = build_saw(&g, l).unwrap();
            for i in 0..n {
                assert_eq!(s.row(i), &brute[i][..], "seed {seed} l {l} row {i}");
            }
        }
    }
}

#[test]
fn power_iteration_matches_dense_solver() {
    let opts = EigenOptions::default();
    for seed in 0..4 {
        let inst = sample_rsbm(&RsbmParams::sampleable(20, 4, 3).unwrap(), seed).unwrap();
        let dense = dense_spectrum(&inst.graph);
        let s = second_eigenvector(&inst.graph, &opts).unwrap();
        assert!((s.lambda2 - dense[1]).abs() < 1e-8, "{} vs {}", s.lambda2, dense[1]);
        let top = top_eigenpairs(&inst.graph, 3, &opts).unwrap();
        let mut by_abs = dense.clone();
        by_abs.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
        for k in 0..3 {
            assert!((top.eigenvalues[k].abs() - by_abs[k].abs()).abs() < 1e-6);
        }
        let gamma = top.gamma.unwrap();
        assert!((gamma - (1.0 - dense[1] / 7.0)).abs() < 1e-8);
    }
}

#[test]
fn partitions_match_naive_scan() {
    for seed in 0..6 {
        let inst = sample_rsbm(&RsbmParams::sampleable(6, 3, 2).unwrap(), seed).unwrap();
        let g = &inst.graph;
        let naive = naive_sides(12);
        assert_eq!(naive.len(), 462);
        let valid: Vec<Vec<usize>> = naive
            .iter()
            .filter(|s| induced_degrees_all(g, s, 3))
            .cloned()
            .collect();
        let cert = regular_partitions(g, 3, Some(&inst.labels)).unwrap();
        let mut got = cert.valid_partitions.clone();
        got.sort();
        let mut want = valid.clone();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(cert.checked_count, 462);
        assert_eq!(cert.planted_found, Some(true));

        let min = naive.iter().map(|s| cut_size(g, s)).min().unwrap();
        let count = naive.iter().filter(|s| cut_size(g, s) == min).count() as u64;
        let b = min_bisection_bruteforce(g, Some(&inst.labels)).unwrap();
        assert_eq!(b.min_cut, min);
        assert_eq!(b.argmin_count, count);
        for side in &b.argmin_partitions {
            assert_eq!(cut_size(g, side), min);
        }
    }
}

#[test]
fn expansion_scan_matches_naive() {
    let g = sample_rsbm(&RsbmParams::sampleable(6, 3, 3).unwrap(), 5).unwrap().graph;
    let dense = dense_spectrum(&g);
    let gamma = 1.0 - dense[1] / 6.0;
    let r = edge_expansion_check(&g, gamma).unwrap();
    let mut worst = f64::INFINITY;
    for m in 1u32..1 << 12 {
        if m.count_ones() > 6 {
            continue;
        }
        let side: Vec<usize> = (0..12).filter(|&v| m >> v & 1 == 1).collect();
        worst = worst.min(cut_size(&g, &side) as f64 / (6.0 * side.len() as f64));
    }
    assert_eq!(r.worst_ratio, worst);
    assert_eq!(r.violations, 0);
    assert!(r.worst_ratio >= gamma / 2.0 - 1e-9);
    assert_eq!(cut_size(&g, &r.witness) as f64 / (6.0 * r.witness.len() as f64), worst);
}

#[test]
fn rigidity_spec_examples() {
    // sides K4, cross a perfect matching
    let k4 = Graph::complete(4);
    let mut edges: Vec<(usize, usize)> = k4.edges().collect();
    edges.extend(k4.edges().map(|(u, v)| (u + 4, v + 4)));
    edges.extend((0..4).map(|i| (i, i + 4)));
    let g = Graph::from_edges(8, &edges).unwrap();
    let cert = regular_partitions(&g, 3, Some(&Labeling::halves(4))).unwrap();
    assert_eq!(cert.checked_count, 35);
    assert!(cert.is_unique);

    // sides K4, cross K_{4,4} minus a perfect matching (3-regular)
    let mut edges: Vec<(usize, usize)> = k4.edges().collect();
    edges.extend(k4.edges().map(|(u, v)| (u + 4, v + 4)));
    edges.extend((0..4).flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j + 4))));
    let g = Graph::from_edges(8, &edges).unwrap();
    let cert = regular_partitions(&g, 3, Some(&Labeling::halves(4))).unwrap();
    assert_eq!(cert.checked_count, 35);
    assert_eq!(cert.planted_found, Some(true));
    // K8 minus a perfect matching: a side induces K4 iff it takes one vertex
    // of each matched pair, 2^4 / 2 sides up to complement
    let expected = naive_sides(8)
        .into_iter()
        .filter(|s| induced_degrees_all(&g, s, 3))
        .count();
    assert_eq!(cert.valid_partitions.len(), expected);
    assert_eq!(expected, 8);
    assert!(!cert.is_unique);
}
