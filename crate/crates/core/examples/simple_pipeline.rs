//! The pipeline without the composition step: the lacunary ultrametric of
//! the S-map, with a much weaker distortion bound.

use ultraskel::metric::{MeasuredMetricSpace, MetricSpace};
use ultraskel::skeleton::{build_skeleton, PipelineParams};

fn main() {
    let x = MeasuredMetricSpace::counting(MetricSpace::random_euclidean(20, 2, 8).unwrap());
    for simple in [false, true] {
        let p = PipelineParams::from_delta(0.3).unwrap().with_simple(simple);
        let r = build_skeleton(&x, &p).unwrap();
        println!(
            "simple = {simple:5}: |S| = {:2}, distortion {:8.4}, exponent {:.3e}, log bound {:.2}, ok {}",
            r.subset.len(),
            r.distortion,
            r.exponent_s,
            if simple { p.log_distortion_bound() } else { p.d.ln() },
            r.ok()
        );
    }
}
