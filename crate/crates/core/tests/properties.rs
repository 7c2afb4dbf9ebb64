use entperc_core::analytic::{giant_s, lambert_w0, solve_u, ws_limited_avg};
use entperc_core::generators::{gen_er, gen_ws};
use entperc_core::qswap::apply_qswaps;
use entperc_core::{DegreeModel, EdgeClass, Graph, SwapStrategy};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn er(n: usize, z: f64, seed: u64) -> Graph {
    gen_er(n, z, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn component_sizes_partition_vertices(n in 1usize..300, z in 0.0f64..4.0, seed: u64) {
        let g = er(n, z.min(n as f64 - 1.0).max(0.0), seed);
        prop_assert!(g.check_invariants());
        let stats = g.components();
        prop_assert_eq!(stats.sizes().iter().sum::<usize>(), n);
        prop_assert!(stats.giant_fraction() <= 1.0);
    }

    #[test]
    fn bfs_ball_is_monotone(n in 3usize..200, beta in 0.0f64..1.0, seed: u64) {
        let g = gen_ws(n, beta, &mut ChaCha8Rng::seed_from_u64(seed));
        let comp = g.components();
        let mut last = 0;
        for l in 0..n {
            let b = g.bfs_ball(0, l);
            prop_assert!(b >= last);
            last = b;
        }
        prop_assert!(comp.sizes().contains(&last));
    }

    #[test]
    fn swapped_graphs_stay_simple(
        n in 10usize..400,
        z in 1.0f64..5.0,
        qs in prop::collection::btree_set(2usize..6, 1..4),
        seed: u64,
    ) {
        let g = er(n, z, seed);
        let degrees: Vec<usize> = qs.into_iter().collect();
        let strategy = SwapStrategy::all(&degrees).unwrap();
        let (h, report) = apply_qswaps(&g, &strategy, &mut ChaCha8Rng::seed_from_u64(seed ^ 1)).unwrap();
        prop_assert!(h.check_invariants());
        prop_assert_eq!(h.vertex_count(), n);
        for (a, &u) in report.centers.iter().enumerate() {
            prop_assert_eq!(h.degree(u), 0);
            for &v in &report.centers[a + 1..] {
                prop_assert!(!g.is_adjacent(u, v), "centers {} and {} adjacent", u, v);
            }
        }
        let removed: usize = report.centers.iter().map(|&c| g.degree(c)).sum();
        let born: usize = report
            .centers
            .iter()
            .map(|&c| if g.degree(c) == 2 { 1 } else { g.degree(c) })
            .sum();
        prop_assert_eq!(h.count_class(EdgeClass::Original), g.edge_count() - removed);
        prop_assert_eq!(h.count_class(EdgeClass::Newborn), born);
        for q in degrees {
            let eta = report.eta(q);
            prop_assert!((0.0..=1.0).contains(&eta));
        }
    }

    #[test]
    fn giant_is_monotone_in_occupation(z in 0.2f64..6.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let m = DegreeModel::poisson(z).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let s_lo = giant_s(lo, &m).unwrap();
        let s_hi = giant_s(hi, &m).unwrap();
        prop_assert!(s_lo <= s_hi + 1e-10);
        prop_assert!((0.0..=1.0).contains(&s_hi));
        let u = solve_u(hi, &m).unwrap();
        prop_assert!(u.converged && (0.0..=1.0).contains(&u.u));
    }

    #[test]
    fn ws_average_grows_in_beta_and_l(b1 in 0.0f64..1.0, b2 in 0.0f64..1.0, l in 1usize..25) {
        let (lo, hi) = (b1.min(b2), b1.max(b2));
        let s_lo = ws_limited_avg(lo, l).unwrap();
        let s_hi = ws_limited_avg(hi, l).unwrap();
        prop_assert!(s_lo[l] <= s_hi[l]);
        prop_assert!(s_hi.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn lambert_inverts(x in -0.3678f64..50.0) {
        let w = lambert_w0(x).unwrap();
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1e-2));
    }
}
