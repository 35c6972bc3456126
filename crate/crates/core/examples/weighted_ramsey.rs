//! Two-weight Ramsey subsets with a derandomized and a sampled shift.

use ultraskel::metric::MetricSpace;
use ultraskel::oracles::optimal_ultrametric_distortion_on;
use ultraskel::ramsey::{ramsey_subset, ShiftMode};

fn main() {
    let space = MetricSpace::random_euclidean(32, 2, 3).unwrap();
    let ones = vec![1.0; space.len()];
    for eps in [0.3, 0.5, 0.7] {
        let out = ramsey_subset(&space, &ones, &ones, eps, ShiftMode::Derandomized).unwrap();
        let c = &out.certificate;
        println!(
            "eps {eps}: |S| = {:2} (need {:5.2}), distortion {:.3} <= D = {:.3}, best possible on S {:.3}, ok {}",
            out.subset.len(),
            c.required,
            c.distortion,
            c.distortion_bound,
            optimal_ultrametric_distortion_on(&space, out.subset.as_slice()),
            c.ok
        );
    }

    let w1: Vec<f64> = (0..space.len()).map(|i| 1.0 + (i % 4) as f64).collect();
    for seed in 0..3 {
        let out = ramsey_subset(&space, &w1, &ones, 0.5, ShiftMode::Sampled { seed }).unwrap();
        println!(
            "seed {seed}: shift {:.4}, achieved {:.3} vs required {:.3}",
            out.certificate.shift, out.certificate.achieved, out.certificate.required
        );
    }
}
