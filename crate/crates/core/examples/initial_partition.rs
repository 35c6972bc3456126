//! The initial tree: nested ball partitions down to singletons, with the
//! designated heavy child at every vertex.

use ultraskel::metric::{MeasuredMetricSpace, MetricSpace};
use ultraskel::partition::{build_initial_partition, PartitionBuildParams};

fn main() {
    let space = MetricSpace::random_euclidean(16, 2, 11).unwrap();
    let x = MeasuredMetricSpace::counting(space.normalize_diameter().unwrap().space);
    let params = PartitionBuildParams::with_minimal_m(0.05, 8, 2, x.space.min_distance()).unwrap();
    println!("tau = {}, h = {}, k = {}, m = {}", params.tau, params.h, params.k, params.m);

    let (map, wt) = build_initial_partition(&x, &params).unwrap();
    let tree = map.tree();
    println!("{} vertices, height {}, {} leaves", map.len(), tree.height(), tree.leaves().len());
    println!("valid: {:?}", map.validate(x.len()));

    let mut branching = vec![0usize; tree.height() + 1];
    for v in 0..map.len() {
        if tree.children(v).len() > 1 {
            branching[tree.depth(v)] += 1;
        }
    }
    let levels: Vec<String> =
        branching.iter().enumerate().filter(|(_, &c)| c > 0).map(|(d, c)| format!("{d}:{c}")).collect();
    println!("branching vertices by depth: {}", levels.join(" "));

    let root = tree.root();
    println!("w(root) = {}, designated child of root: {:?}", wt.w[root], wt.designated[root]);
    let designated = (0..map.len()).filter(|&v| wt.is_designated(v)).count();
    println!("{designated} designated vertices");
}
