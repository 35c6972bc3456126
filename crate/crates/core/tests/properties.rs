//! Property tests over random small spaces, trees and set systems.

use proptest::prelude::*;

use ultraskel::adversarial::{product_tree_truncation, LevelSpec, ProductTreeSpec};
use ultraskel::metric::{random_graph_metric, MeasuredMetricSpace, MetricSpace, Norm};
use ultraskel::oracles::{
    distortion_of_pair, min_cost_set_cover, min_cost_set_cover_exhaustive, optimal_ultrametric_distortion,
    subdominant,
};
use ultraskel::ramsey::{ramsey_subset, ShiftMode};
use ultraskel::skeleton::solve_measure;
use ultraskel::tree::{enumerate_cutsets, is_minimal_cutset, min_cutset_cost, RootedTree};
use ultraskel::ultrametric::Ultrametric;

/// Distinct-ish points in the plane, 2 to `max` of them.
fn plane(max: usize) -> impl Strategy<Value = MetricSpace> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 2..=max).prop_filter_map("coincident points", |pts| {
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|(x, y)| vec![x, y]).collect();
        let s = MetricSpace::from_points(&pts, Norm::L2).ok()?;
        (s.min_distance() > 1e-6).then_some(s)
    })
}

fn graph(max: usize) -> impl Strategy<Value = MetricSpace> {
    (2..=max, any::<u64>()).prop_map(|(n, seed)| random_graph_metric(n, seed))
}

fn space(max: usize) -> impl Strategy<Value = MetricSpace> {
    prop_oneof![plane(max), graph(max)]
}

/// Parent arrays with `parent[i] < i`.
fn tree(max: usize) -> impl Strategy<Value = RootedTree> {
    (1..=max).prop_flat_map(|n| {
        (1..n).map(|i| (0..i).prop_map(Some).boxed()).collect::<Vec<_>>().prop_map(|tail| {
            let mut parents = vec![None];
            parents.extend(tail);
            RootedTree::from_parents(parents).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_round_trips(s in space(12)) {
        let norm = s.normalize_diameter().unwrap();
        prop_assert!((norm.space.diameter() - 1.0).abs() <= 1e-15);
        let back = norm.rescale();
        for (a, b) in back.as_flat().iter().zip(s.as_flat()) {
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }
    }

    #[test]
    fn rejects_broken_triangles(s in plane(8), i in 0usize..8, j in 0usize..8) {
        let n = s.len();
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j && n >= 3);
        let mut d = s.as_flat().to_vec();
        d[i * n + j] = 3.0 * s.diameter();
        d[j * n + i] = 3.0 * s.diameter();
        prop_assert!(MetricSpace::from_flat(n, d).is_err());
    }

    #[test]
    fn subdominant_is_a_dominated_ultrametric(s in space(12)) {
        let u = subdominant(&s);
        prop_assert!(u.strong_triangle_witness().is_none());
        for i in 0..s.len() {
            for j in 0..s.len() {
                prop_assert!(u.get(i, j) <= s.d(i, j) * (1.0 + 1e-12));
            }
        }
        let rebuilt = Ultrametric::from_merges(u.points().to_vec(), &u.merges()).unwrap();
        prop_assert_eq!(rebuilt.as_flat(), u.as_flat());
        let opt = optimal_ultrametric_distortion(&s);
        prop_assert!(opt >= 1.0 - 1e-12);
        prop_assert!(opt <= distortion_of_pair(&s, &u).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn cutset_recursion_matches_enumeration(t in tree(14), seed in any::<u64>(), theta in 0.05..1.0f64) {
        let cost: Vec<f64> = (0..t.len()).map(|v| 0.1 + ((seed >> (v % 60)) % 97) as f64 / 10.0).collect();
        let sets = enumerate_cutsets(&t).unwrap();
        prop_assert!(sets.iter().all(|c| is_minimal_cutset(&t, c)));
        let brute = sets
            .iter()
            .map(|c| c.iter().map(|&v| cost[v].powf(theta)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let dp = min_cutset_cost(&t, &cost, theta);
        prop_assert!((dp - brute).abs() <= 1e-9 * brute.max(1.0));
    }

    #[test]
    fn set_cover_dp_matches_exhaustive(
        universe in 1usize..=8,
        raw in prop::collection::vec((any::<u32>(), 0.1..5.0f64), 1..=10),
    ) {
        let mask = (1u32 << universe) - 1;
        let sets: Vec<(u32, f64)> = raw.into_iter().map(|(m, c)| (m & mask, c)).collect();
        match (min_cost_set_cover(universe, &sets), min_cost_set_cover_exhaustive(universe, &sets)) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0)),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "dp {:?} vs exhaustive {:?}", a, b),
        }
    }

    #[test]
    fn ramsey_certificate_holds(s in space(14), eps in 0.2..0.9f64, seed in any::<u64>(), w in prop::collection::vec(0.1..4.0f64, 14)) {
        let n = s.len();
        let w1 = &w[..n];
        let ones = vec![1.0; n];
        let out = ramsey_subset(&s, w1, &ones, eps, ShiftMode::Sampled { seed }).unwrap();
        prop_assert!(!out.subset.is_empty());
        prop_assert!(out.ultrametric.strong_triangle_witness().is_none());
        let c = &out.certificate;
        prop_assert!(c.distortion <= c.distortion_bound * (1.0 + 1e-12));
        let det = ramsey_subset(&s, w1, &ones, eps, ShiftMode::Derandomized).unwrap();
        prop_assert!(det.certificate.ok, "{:?}", det.certificate);
        prop_assert!(det.certificate.achieved >= det.certificate.required * (1.0 - 1e-12));
    }

    #[test]
    fn skeleton_certificate_holds(s in space(12)) {
        let x = MeasuredMetricSpace::counting(s);
        let r = solve_measure(&x, 0.9).unwrap();
        prop_assert!(r.ok(), "{:?}", r.certificate);
        let achieved = distortion_of_pair(&x.space, &r.ultrametric).unwrap();
        prop_assert!(achieved <= r.params.d * (1.0 + 1e-12));
        prop_assert_eq!(r.map.tree().leaves().len(), r.subset.len());
    }

    #[test]
    fn truncations_are_metrics(sizes in prop::collection::vec(2usize..=4, 1..=3), alpha in 0.3..3.0f64) {
        let spec = ProductTreeSpec { alpha, levels: sizes.iter().map(|&n| LevelSpec::equilateral(n)).collect() };
        let t = product_tree_truncation(&spec, sizes.len()).unwrap();
        prop_assert!(t.validated);
        prop_assert_eq!(t.space.len(), sizes.iter().product::<usize>());
        prop_assert_eq!(t.space.diameter(), 1.0);
    }
}
