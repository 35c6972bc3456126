//! Level selection and sparsification of a weighted tree.

use ultraskel::metric::{MeasuredMetricSpace, MetricSpace};
use ultraskel::partition::{build_initial_partition, PartitionBuildParams, WeightedTree};
use ultraskel::sparsify::{check_sparsified, f_level, holder_levels, sparsify_tree};
use ultraskel::tree::RootedTree;

fn main() {
    // Root of weight 5 with children of weight 4 and 1, one leaf each.
    let t = RootedTree::from_parents(vec![None, Some(0), Some(0), Some(1), Some(2)]).unwrap();
    let wt = WeightedTree::new(t, vec![5.0, 4.0, 1.0, 4.0, 1.0], 2, 2).unwrap();
    let hl = holder_levels(&wt).unwrap();
    println!("levels {:?}, f(root) {:?}, target {}", hl.levels, hl.f_root, hl.target);
    for i in 1..=wt.h {
        println!("  f_{i} = {:?}", f_level(&wt, i));
    }

    let space = MetricSpace::random_euclidean(14, 2, 5).unwrap();
    let x = MeasuredMetricSpace::counting(space.normalize_diameter().unwrap().space);
    let params = PartitionBuildParams::with_minimal_m(1.0 / 30.0, 8, 2, x.space.min_distance()).unwrap();
    let (_, wt) = build_initial_partition(&x, &params).unwrap();
    let sp = sparsify_tree(&wt).unwrap();
    let kept = sp.keep.iter().filter(|&&k| k).count();
    let r = sp.r.iter().filter(|&&k| k).count();
    let s = sp.s.iter().filter(|&&k| k).count();
    println!("sparsified: kept {kept} of {} vertices, |R| = {r}, |S| = {s}", wt.tree.len());
    let check = check_sparsified(&wt, &sp);
    println!("all checks pass: {}", check.ok());
    for rec in sp.records.iter().take(3) {
        println!(
            "  block at {:?}: chosen {:?}, {:.4} >= {:.4}",
            rec.roots, rec.chosen, rec.double_power_lhs, rec.double_power_rhs
        );
    }
}
