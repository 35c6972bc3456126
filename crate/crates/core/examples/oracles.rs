//! Independent oracles: subdominant ultrametric, optimal distortion, set
//! cover and brute-force subsets, in float and rational arithmetic.

use ultraskel::metric::MetricSpace;
use ultraskel::oracles::{
    brute_force_ramsey, exact_optimal_ultrametric_distortion, min_cost_set_cover,
    min_cost_set_cover_exhaustive, optimal_ultrametric_distortion, subdominant,
};

fn path(n: usize) -> MetricSpace {
    let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
    MetricSpace::from_points(&pts, ultraskel::metric::Norm::L1).unwrap()
}

fn main() {
    for m in 2..=5 {
        let p = path(m + 1);
        println!(
            "path on {} points: distortion {} (exact {})",
            m + 1,
            optimal_ultrametric_distortion(&p),
            exact_optimal_ultrametric_distortion(&p).unwrap()
        );
    }
    let u = subdominant(&path(4));
    println!("subdominant of path4: {}", u.to_newick(|q| q.to_string()));

    let sets = [(0b0011, 1.0), (0b1100, 1.0), (0b0110, 0.5), (0b1001, 0.5), (0b1111, 2.5)];
    println!(
        "set cover: dp {} exhaustive {}",
        min_cost_set_cover(4, &sets).unwrap(),
        min_cost_set_cover_exhaustive(4, &sets).unwrap()
    );

    let space = MetricSpace::random_euclidean(9, 2, 2).unwrap();
    let b = brute_force_ramsey(&space, &vec![1.0; 9], 3.0).unwrap();
    println!("best subset at D = 3: {:?}, value {:.3} vs bound {:.3}", b.subset.as_slice(), b.value, b.bound);
}
