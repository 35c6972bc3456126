//! A skeleton at distortion 2 + delta, with the ball-cover check.

use ultraskel::metric::{MeasuredMetricSpace, MetricSpace};
use ultraskel::skeleton::{solve_measure_2plus, verify_cover, CoverMode};

fn main() {
    let x = MeasuredMetricSpace::counting(MetricSpace::random_euclidean(16, 2, 4).unwrap());
    let r = solve_measure_2plus(&x, 0.3).unwrap();
    println!("tau = {}, D = {}, s = {:.3e}", r.params.tau, r.params.d, r.exponent_s);
    println!("|S| = {}, distortion {:.4}, ok {}", r.subset.len(), r.distortion, r.ok());

    for mode in [CoverMode::Exact, CoverMode::Sampled { seed: 1, samples: 200 }] {
        let v = verify_cover(&r, &x, r.exponent_s, mode).unwrap();
        println!(
            "{mode:?}: min cover {:.6} >= {:.6}, singletons {:.3}, ok {}",
            v.min_cost, v.bound, v.singleton_sum, v.ok
        );
    }

    let half = solve_measure_2plus(&x, 0.45).unwrap();
    println!("delta 0.45: tau = {}, substituted {}", half.params.tau, half.params.tau_substituted);
}
