mod common;

use common::random_graph;
use proptest::prelude::*;
use rsbm::graphgen::{sample_instance, validate_instance, SamplerOptions};
use rsbm::io::{read_edge_list, read_labels, write_edge_list, write_labels, EdgeListHeader};
use rsbm::model::{roots, z_sequence};
use rsbm::recovery::{majority_iterate, majority_step, overlap};
use rsbm::rigidity::{min_bisection_bruteforce, regular_partitions, rsbm_membership};
use rsbm::saw::{build_saw, saw_row_sums, tangle_audit};
use rsbm::spectral::matvec;
use rsbm::{Graph, Labeling, RsbmParams, SamplerKind};

fn labels_strategy(n: usize) -> impl Strategy<Value = Labeling> {
    prop::collection::vec(prop::bool::ANY, n)
        .prop_map(|b| Labeling::new(b.into_iter().map(|x| if x { 1 } else { -1 }).collect()).unwrap())
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (4usize..14, 0.1f64..0.7, any::<u64>()).prop_map(|(n, p, s)| random_graph(n, p, s))
}

/// Small structurally valid parameters with `d1 > d2`.
fn params_strategy() -> impl Strategy<Value = RsbmParams> {
    (3usize..7, 1usize..4, 8usize..24).prop_filter_map("needs d1 > d2, even n d1", |(d1, d2, n)| {
        let p = RsbmParams::sampleable(n, d1, d2).ok()?;
        (d1 > d2).then_some(p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matvec_is_linear(g in graph_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0, seed in any::<u64>()) {
        let n = g.num_vertices();
        let x: Vec<f64> = (0..n).map(|i| ((seed.wrapping_add(i as u64) % 17) as f64) - 8.0).collect();
        let y: Vec<f64> = (0..n).map(|i| ((seed.wrapping_mul(i as u64 + 3) % 11) as f64) - 5.0).collect();
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = matvec(&g, &combo).unwrap();
        let (ax, ay) = (matvec(&g, &x).unwrap(), matvec(&g, &y).unwrap());
        for i in 0..n {
            prop_assert!((lhs[i] - (a * ax[i] + b * ay[i])).abs() < 1e-9);
        }
    }

    #[test]
    fn majority_is_sign_equivariant(g in graph_strategy(), seed in any::<u64>()) {
        let n = g.num_vertices();
        let l = Labeling::new((0..n).map(|i| if (seed >> (i % 64)) & 1 == 1 { 1 } else { -1 }).collect()).unwrap();
        prop_assert_eq!(majority_step(&g, &l.negated()).unwrap(), majority_step(&g, &l).unwrap().negated());
    }

    #[test]
    fn overlap_is_symmetric_and_flip_invariant(a in labels_strategy(20), b in labels_strategy(20)) {
        let o = overlap(&a, &b).unwrap();
        prop_assert_eq!(o, overlap(&b, &a).unwrap());
        prop_assert_eq!(o, overlap(&a, &b.negated()).unwrap());
        prop_assert!(o.agreement >= 0.5 && o.agreement <= 1.0);
        prop_assert_eq!(o.errors as f64, (20.0 * (1.0 - o.agreement)).round());
    }

    #[test]
    fn saw_low_orders(g in graph_strategy()) {
        let n = g.num_vertices();
        let s1 = build_saw(&g, 1).unwrap();
        let s2 = build_saw(&g, 2).unwrap();
        let s3 = build_saw(&g, 3).unwrap();
        prop_assert!(s3.is_symmetric());
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(s1.get(i, j), g.has_edge(i, j) as u32);
                let common = g.neighbors(i).iter().filter(|&&k| g.has_edge(k, j)).count() as u32;
                let a2 = if i == j { 0 } else { common };
                prop_assert_eq!(s2.get(i, j), a2);
            }
        }
    }

    #[test]
    fn instances_satisfy_eigen_identities(p in params_strategy(), seed in any::<u64>()) {
        for sampler in [SamplerKind::Configuration, SamplerKind::Permutation] {
            if sampler == SamplerKind::Permutation && p.d1 % 2 == 1 {
                continue;
            }
            let inst = sample_instance(&p, seed, sampler, &SamplerOptions::default()).unwrap();
            prop_assert!(validate_instance(&inst).is_clean());
            let e = vec![1.0; 2 * p.n];
            let sigma = inst.labels.to_f64();
            let ae = matvec(&inst.graph, &e).unwrap();
            let asg = matvec(&inst.graph, &sigma).unwrap();
            for v in 0..2 * p.n {
                prop_assert_eq!(ae[v], (p.d1 + p.d2) as f64);
                prop_assert_eq!(asg[v], (p.d1 as f64 - p.d2 as f64) * sigma[v]);
            }
            prop_assert_eq!(majority_step(&inst.graph, &inst.labels).unwrap(), inst.labels.clone());
            prop_assert_eq!(majority_step(&inst.graph, &inst.labels.negated()).unwrap(), inst.labels.negated());
        }
    }

    #[test]
    fn sampling_is_deterministic(p in params_strategy(), seed in any::<u64>()) {
        let a = sample_instance(&p, seed, SamplerKind::Configuration, &SamplerOptions::default()).unwrap();
        let b = sample_instance(&p, seed, SamplerKind::Configuration, &SamplerOptions::default()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn files_round_trip(p in params_strategy(), seed in any::<u64>()) {
        let inst = sample_instance(&p, seed, SamplerKind::Configuration, &SamplerOptions::default()).unwrap();
        let h = EdgeListHeader::of(&inst);
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &inst.graph, Some(&h)).unwrap();
        let (g, h2) = read_edge_list(&buf[..]).unwrap();
        prop_assert_eq!(&g, &inst.graph);
        prop_assert_eq!(h2.as_ref(), Some(&h));
        let mut again = Vec::new();
        write_edge_list(&mut again, &g, h2.as_ref()).unwrap();
        prop_assert_eq!(&again, &buf);
        let mut lb = Vec::new();
        write_labels(&mut lb, &inst.labels).unwrap();
        prop_assert_eq!(read_labels(&lb[..]).unwrap(), inst.labels);
    }

    #[test]
    fn converged_means_fixed_point(g in graph_strategy(), seed in any::<u64>()) {
        let n = g.num_vertices();
        let l = Labeling::new((0..n).map(|i| if (seed >> (i % 64)) & 1 == 1 { 1 } else { -1 }).collect()).unwrap();
        let r = majority_iterate(&g, &l, 50, Some(&l)).unwrap();
        let errs = r.per_round_errors.as_ref().unwrap();
        prop_assert_eq!(errs.len(), r.rounds_used + 1);
        if r.converged {
            prop_assert_eq!(majority_step(&g, &r.final_labels).unwrap(), r.final_labels.clone());
        }
    }

    #[test]
    fn tree_vertices_have_tree_row_sums(seed in any::<u64>(), l in 1usize..4) {
        let p = RsbmParams::sampleable(200, 4, 2).unwrap();
        let inst = sample_instance(&p, seed, SamplerKind::Configuration, &SamplerOptions::default()).unwrap();
        let audit = tangle_audit(&inst.graph, l);
        let z = z_sequence(4, 2, l).unwrap();
        for &v in audit.tree_vertices.iter().take(40) {
            let (count, signed) = saw_row_sums(&inst.graph, v, l, &inst.labels);
            prop_assert_eq!(count, 6 * 5u64.pow(l as u32 - 1));
            prop_assert_eq!(signed as i128, z[l - 1] * inst.labels.get(v) as i128);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rigidity_oracles_agree(seed in any::<u64>(), d2 in 1usize..4) {
        let p = RsbmParams::sampleable(6, 3, d2).unwrap();
        let inst = sample_instance(&p, seed, SamplerKind::Configuration, &SamplerOptions::default()).unwrap();
        let cert = regular_partitions(&inst.graph, 3, Some(&inst.labels)).unwrap();
        prop_assert_eq!(cert.planted_found, Some(true));
        for side in &cert.valid_partitions {
            prop_assert_eq!(side[0], 0);
            prop_assert_eq!(side.len(), 6);
        }
        let m = rsbm_membership(&inst.graph, 3, d2).unwrap();
        prop_assert_eq!(m.member, !cert.valid_partitions.is_empty());
        prop_assert_eq!(m.witness.as_ref(), cert.valid_partitions.first());
        let b = min_bisection_bruteforce(&inst.graph, Some(&inst.labels)).unwrap();
        prop_assert!(b.min_cut <= (p.n * d2) as u64);
        prop_assert_eq!(b.planted_cut, Some((p.n * d2) as u64));
    }

    #[test]
    fn closed_form_tracks_recurrence(d1 in 3usize..40, d2 in 3usize..40) {
        if let Some(r) = roots(d1, d2) {
            prop_assert!((r.alpha * r.beta - (d1 + d2 - 1) as f64).abs() < 1e-9 * (d1 + d2) as f64);
            prop_assert!((r.alpha + r.beta - (d1 as f64 - d2 as f64)).abs() < 1e-9 * (d1 + d2) as f64);
            let z = z_sequence(d1, d2, 20).unwrap();
            for (k, zk) in z.iter().enumerate() {
                let k = k as i32 + 1;
                let cf = r.a_const * r.alpha.powi(k) + r.b_const * r.beta.powi(k);
                let exact = *zk as f64;
                prop_assert!((cf - exact).abs() <= 1e-9 * exact.abs().max(1.0), "k={} {} vs {}", k, cf, exact);
            }
        }
    }
}
