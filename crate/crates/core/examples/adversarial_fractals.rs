//! Finite pieces of the lower-bound spaces: product trees of metrics,
//! G(n, 1/2) levels and expander levels.

use ultraskel::adversarial::{
    expander_fractal_level, gnhalf_fractal_level, largest_cluster_subset, prefix_cover_check,
    product_tree_truncation, LevelSpec, ProductTreeSpec,
};
use ultraskel::oracles::optimal_ultrametric_distortion;

fn main() {
    let spec = ProductTreeSpec::constant(1.5, LevelSpec::equilateral(3), 3);
    let t = product_tree_truncation(&spec, 3).unwrap();
    println!("equilateral^3: {} points, diam {}, validated {}", t.space.len(), t.space.diameter(), t.validated);
    let covers = prefix_cover_check(&spec, 3).unwrap();
    println!("prefix covers: {}, min sum {:?}, ok {}", covers.covers, covers.min_sum, covers.ok);

    for seed in [42, 7] {
        let g = gnhalf_fractal_level(16, seed).unwrap();
        let c = largest_cluster_subset(&g).unwrap();
        println!("G(16, 1/2) seed {seed}: largest cluster subset {} {:?}", c.len(), c.as_slice());
    }

    let lvl = expander_fractal_level(1.0, 32, 1).unwrap();
    println!("expander n = 32: lambda {:.3}, hop diameter {}, attempts {}", lvl.lambda, lvl.hops, lvl.attempts);
    println!("  best ultrametric distortion {:.3}", optimal_ultrametric_distortion(&lvl.space()));
    println!("n = 4: {}", expander_fractal_level(10.0, 4, 1).unwrap_err());
}
