//! A hand-built fragmentation map: validity, lacunarity, the induced
//! ultrametric and the cheapest cut set.

use ultraskel::metric::MetricSpace;
use ultraskel::pointset::PointSet;
use ultraskel::tree::{min_cutset_cost, to_dot, FragmentationMap, LacunarityParams, RootedTree};

fn main() {
    // Two tight pairs far apart.
    let space = MetricSpace::from_points(
        &[vec![0.0], vec![0.1], vec![1.0], vec![1.1]],
        ultraskel::metric::Norm::L2,
    )
    .unwrap();
    let tree = RootedTree::from_parents(vec![None, Some(0), Some(0), Some(1), Some(1), Some(2), Some(2)]).unwrap();
    let clusters = vec![
        PointSet::full(4),
        PointSet::from(vec![0, 1]),
        PointSet::from(vec![2, 3]),
        PointSet::singleton(0),
        PointSet::singleton(1),
        PointSet::singleton(2),
        PointSet::singleton(3),
    ];
    let map = FragmentationMap::new(tree, clusters).unwrap();
    println!("valid: {:?}", map.validate(4));
    println!("diameters: {:?}", map.cluster_diameters(&space));
    for k in [1.0, 2.0, 20.0] {
        println!("lacunary with K = {k:4}, gamma = 1: {}", map.is_lacunary(&space, LacunarityParams::new(k, 1.0)));
    }
    println!("separated at beta = 2: {}", map.is_separated(&space, 2.0, 0..map.len()));

    let u = map.ultrametric_from_lacunary(&space);
    println!("ultrametric newick: {}", u.to_newick(|p| format!("x{p}")));

    // Cost of a vertex is the measure of its parent's cluster.
    let t = map.tree();
    let cost: Vec<f64> = (0..map.len()).map(|v| map.cluster(t.parent(v).unwrap_or(v)).len() as f64).collect();
    for theta in [0.5, 1.0] {
        println!("min cut-set cost at theta = {theta}: {:.4}", min_cutset_cost(t, &cost, theta));
    }
    print!("{}", to_dot(&map, |p| format!("x{p}")));
}
