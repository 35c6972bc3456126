//! The exponent profile theta(D) and weighted subsets at a given distortion.

use ultraskel::metric::MetricSpace;
use ultraskel::ramsey::{distortion_for_epsilon, dvoretzky_subset, theta_inverse, theta_of_distortion};

fn main() {
    println!("{:>8} {:>10} {:>10}", "D", "theta", "1-2e/D");
    for d in [2.1, 2.5, 3.0, 5.0, 8.0, 10.0, 100.0] {
        let th = theta_of_distortion(d).unwrap();
        println!("{d:8.2} {th:10.6} {:10.6}", 1.0 - 2.0 * std::f64::consts::E / d);
    }
    for s in [0.1, 0.5, 0.9] {
        println!("theta^-1({s}) = {:.6}", theta_inverse(s));
    }
    println!("D(eps = 0.5) = {}", distortion_for_epsilon(0.5));

    let space = MetricSpace::random_euclidean(24, 3, 9).unwrap();
    let w: Vec<f64> = (0..space.len()).map(|i| 1.0 + (i * 7 % 5) as f64).collect();
    for d in [2.5, 4.0, 8.0] {
        let out = dvoretzky_subset(&space, &w, d).unwrap();
        println!(
            "D = {d}: |S| = {:2}, sum w^theta = {:.3} >= {:.3}, distortion {:.3}",
            out.subset.len(),
            out.lhs,
            out.rhs,
            out.certificate.distortion
        );
    }
}
