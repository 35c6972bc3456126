//! A skeleton at exponent 1 - eps with its certificate.

use ultraskel::metric::{MeasuredMetricSpace, MetricSpace};
use ultraskel::report::canonical_json;
use ultraskel::skeleton::solve_measure;

fn main() {
    let x = MeasuredMetricSpace::counting(MetricSpace::random_euclidean(30, 2, 21).unwrap());
    let r = solve_measure(&x, 0.9).unwrap();
    let p = &r.params;
    println!("k = {}, h = {}, tau = {}, D = {:.4}, s = {:.6}", p.k, p.h, p.tau, p.d, r.exponent_s);
    println!("sizes {:?}", r.sizes);
    println!("|S| = {}, distortion {:.4}", r.subset.len(), r.distortion);
    let c = &r.certificate;
    println!("cut-set minimum {:.6} >= mu(X)^s = {:.6}", c.cutset_min, c.bound);
    println!("certificate ok: {}", r.ok());
    println!("{}", r.ultrametric.to_newick(|q| format!("x{q}")));
    println!("{}", canonical_json(&r.certificate));
}
