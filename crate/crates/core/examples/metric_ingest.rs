//! Loads the bundled metrics in every input format and prints their shape.

use std::path::Path;

use ultraskel::metric::{load_metric, metric_to_json, MetricSpace};

fn main() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    for name in ["eq4.json", "path5.csv", "ring.edges", "plane.json"] {
        let x = load_metric(&data.join(name), None).expect("bundled data is valid");
        println!(
            "{name:12} n = {:2}  diam = {:6.3}  min = {:.3}  mu(X) = {}",
            x.len(),
            x.space.diameter(),
            x.space.min_distance(),
            x.total()
        );
    }

    let ring = load_metric(&data.join("ring.edges"), None).unwrap();
    println!("shortest path a -> d: {}", ring.space.d(0, 3));
    let normalized = ring.space.normalize_diameter().unwrap();
    println!("normalized diameter {} (scale {})", normalized.space.diameter(), normalized.scale);

    let bad = MetricSpace::from_rows(&[vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]]);
    println!("triangle check: {}", bad.unwrap_err());

    let x = load_metric(&data.join("eq4.json"), None).unwrap();
    println!("round trip: {}", metric_to_json(&x));
}
