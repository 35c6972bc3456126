//! Finite metric spaces, measures and balls.
//!
//! Distances live in a dense row-major matrix of `f64` and are compared
//! exactly. Validation checks every triple, so a space that passes
//! [`validate_metric`] satisfies the triangle inequality bit for bit on the
//! stored values.

mod io;

pub use io::{load_metric, metric_to_json, parse_csv, parse_edge_list, parse_json, InputFormat};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pointset::PointSet;

/// Index of a point in a metric space.
pub type PointId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("empty metric space")]
    Empty,
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("non-finite distance at ({0}, {1})")]
    NonFinite(PointId, PointId),
    #[error("negative distance at ({0}, {1})")]
    NegativeDistance(PointId, PointId),
    #[error("nonzero diagonal entry at {0}")]
    NonZeroDiagonal(PointId),
    #[error("asymmetric distances at ({0}, {1})")]
    Asymmetry(PointId, PointId),
    #[error("distinct points {0} and {1} at distance zero")]
    ZeroOffDiagonal(PointId, PointId),
    #[error("triangle inequality fails: d({0},{1}) > d({0},{2}) + d({2},{1})")]
    TriangleViolation(PointId, PointId, PointId),
    #[error("measure has {got} entries for {expected} points")]
    MeasureLength { got: usize, expected: usize },
    #[error("measure of point {0} is not a positive finite number")]
    BadMeasure(PointId),
    #[error("a space with fewer than two points has no diameter to normalize")]
    SinglePointSpace,
    #[error("graph is disconnected: no path from {0} to {1}")]
    DisconnectedGraph(String, String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// A validated finite metric space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSpace {
    n: usize,
    dist: Vec<f64>,
    labels: Option<Vec<String>>,
}

/// Checks symmetry, positivity, zero diagonal and every triangle on a flat
/// row-major matrix. Violations are reported in lexicographic order.
pub fn validate_metric(n: usize, dist: &[f64]) -> Result<(), MetricError> {
    if n == 0 {
        return Err(MetricError::Empty);
    }
    if dist.len() != n * n {
        return Err(MetricError::NotSquare { row: 0, len: dist.len(), expected: n * n });
    }
    for i in 0..n {
        for j in 0..n {
            let v = dist[i * n + j];
            if !v.is_finite() {
                return Err(MetricError::NonFinite(i, j));
            }
            if v < 0.0 {
                return Err(MetricError::NegativeDistance(i, j));
            }
        }
    }
    for i in 0..n {
        if dist[i * n + i] != 0.0 {
            return Err(MetricError::NonZeroDiagonal(i));
        }
        for j in (i + 1)..n {
            if dist[i * n + j] != dist[j * n + i] {
                return Err(MetricError::Asymmetry(i, j));
            }
            if dist[i * n + j] == 0.0 {
                return Err(MetricError::ZeroOffDiagonal(i, j));
            }
        }
    }
    for x in 0..n {
        for y in (x + 1)..n {
            let dxy = dist[x * n + y];
            for z in 0..n {
                if z != x && z != y && dxy > dist[x * n + z] + dist[z * n + y] {
                    return Err(MetricError::TriangleViolation(x, y, z));
                }
            }
        }
    }
    Ok(())
}

impl MetricSpace {
    /// Builds and validates a space from a row-major `n * n` matrix.
    pub fn from_flat(n: usize, dist: Vec<f64>) -> Result<Self, MetricError> {
        validate_metric(n, &dist)?;
        Ok(MetricSpace { n, dist, labels: None })
    }

    /// Builds and validates a space from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MetricError> {
        let n = rows.len();
        let mut dist = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare { row, len: r.len(), expected: n });
            }
            dist.extend_from_slice(r);
        }
        Self::from_flat(n, dist)
    }

    /// Builds a space without validation. The caller guarantees the metric
    /// axioms, typically because the matrix was derived from a validated one.
    pub fn from_flat_unchecked(n: usize, dist: Vec<f64>) -> Self {
        debug_assert_eq!(dist.len(), n * n);
        MetricSpace { n, dist, labels: None }
    }

    /// Builds the metric induced by a norm on points in `R^dim`.
    pub fn from_points(points: &[Vec<f64>], norm: Norm) -> Result<Self, MetricError> {
        let n = points.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = norm.distance(&points[i], &points[j]);
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        Self::from_flat(n, dist)
    }

    /// Seeded uniform points in the unit cube under the Euclidean norm.
    pub fn random_euclidean(n: usize, dim: usize, seed: u64) -> Result<Self, MetricError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect();
        Self::from_points(&pts, Norm::L2)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n, "one label per point");
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of a point, falling back to its index.
    pub fn label(&self, p: PointId) -> String {
        match &self.labels {
            Some(l) => l[p].clone(),
            None => p.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, x: PointId, y: PointId) -> f64 {
        self.dist[x * self.n + y]
    }

    pub fn row(&self, x: PointId) -> &[f64] {
        &self.dist[x * self.n..(x + 1) * self.n]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.dist
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest distance between distinct points, `+inf` for a single point.
    pub fn min_distance(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                m = m.min(self.d(i, j));
            }
        }
        m
    }

    /// Diameter of a subset.
    pub fn diam_of(&self, set: &[PointId]) -> f64 {
        let mut m = 0.0f64;
        for (a, &x) in set.iter().enumerate() {
            for &y in &set[a + 1..] {
                m = m.max(self.d(x, y));
            }
        }
        m
    }

    /// `d(A, B) = min d(a, b)`, `+inf` when either side is empty.
    pub fn set_distance(&self, a: &[PointId], b: &[PointId]) -> f64 {
        let mut m = f64::INFINITY;
        for &x in a {
            for &y in b {
                m = m.min(self.d(x, y));
            }
        }
        m
    }

    /// Distance from a point to a set.
    pub fn point_set_distance(&self, x: PointId, set: &[PointId]) -> f64 {
        set.iter().map(|&y| self.d(x, y)).fold(f64::INFINITY, f64::min)
    }

    /// Closed ball `{y : d(x, y) <= r}`.
    pub fn ball_members(&self, b: Ball) -> PointSet {
        let row = self.row(b.center);
        PointSet::from_unsorted((0..self.n).filter(|&y| row[y] <= b.radius).collect())
    }

    /// The subspace on the given points, in the given order.
    pub fn restrict(&self, points: &[PointId]) -> MetricSpace {
        let m = points.len();
        let mut dist = vec![0.0; m * m];
        for (a, &x) in points.iter().enumerate() {
            for (b, &y) in points.iter().enumerate() {
                dist[a * m + b] = self.d(x, y);
            }
        }
        let labels = self.labels.as_ref().map(|l| points.iter().map(|&p| l[p].clone()).collect());
        MetricSpace { n: m, dist, labels }
    }

    /// Rescales so the diameter is exactly one.
    pub fn normalize_diameter(&self) -> Result<NormalizedSpace, MetricError> {
        if self.n < 2 {
            return Err(MetricError::SinglePointSpace);
        }
        let scale = self.diameter();
        let dist = self.dist.iter().map(|v| v / scale).collect();
        Ok(NormalizedSpace {
            space: MetricSpace { n: self.n, dist, labels: self.labels.clone() },
            scale,
        })
    }

    /// All distinct positive distances, sorted.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.n)
            .flat_map(|i| ((i + 1)..self.n).map(move |j| (i, j)))
            .map(|(i, j)| self.d(i, j))
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// A space rescaled to unit diameter, remembering the factor.
#[derive(Clone, Debug)]
pub struct NormalizedSpace {
    pub space: MetricSpace,
    pub scale: f64,
}

impl NormalizedSpace {
    /// Undoes the normalization.
    pub fn rescale(&self) -> MetricSpace {
        let dist = self.space.dist.iter().map(|v| v * self.scale).collect();
        MetricSpace { n: self.space.n, dist, labels: self.space.labels.clone() }
    }
}

/// Closed ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: PointId,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: PointId, radius: f64) -> Self {
        Ball { center, radius }
    }
}

/// Norms for coordinate input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Norm::L1 => diffs.sum(),
            Norm::L2 => diffs.map(|t| t * t).sum::<f64>().sqrt(),
            Norm::Linf => diffs.fold(0.0, f64::max),
        }
    }
}

/// A metric space with a strictly positive finite measure.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasuredMetricSpace {
    pub space: MetricSpace,
    pub mu: Vec<f64>,
}

impl MeasuredMetricSpace {
    pub fn new(space: MetricSpace, mu: Vec<f64>) -> Result<Self, MetricError> {
        if mu.len() != space.len() {
            return Err(MetricError::MeasureLength { got: mu.len(), expected: space.len() });
        }
        if let Some(p) = mu.iter().position(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(MetricError::BadMeasure(p));
        }
        Ok(MeasuredMetricSpace { space, mu })
    }

    /// Counting measure.
    pub fn counting(space: MetricSpace) -> Self {
        let mu = vec![1.0; space.len()];
        MeasuredMetricSpace { space, mu }
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.mu.iter().sum()
    }

    pub fn measure_of(&self, set: &[PointId]) -> f64 {
        set.iter().map(|&p| self.mu[p]).sum()
    }

    pub fn ball_measure(&self, b: Ball) -> f64 {
        let row = self.space.row(b.center);
        (0..self.len()).filter(|&y| row[y] <= b.radius).map(|y| self.mu[y]).sum()
    }
}

/// Standalone form of [`MetricSpace::ball_members`].
pub fn ball_members(space: &MetricSpace, b: Ball) -> PointSet {
    space.ball_members(b)
}

/// Standalone form of [`MetricSpace::normalize_diameter`].
pub fn normalize_diameter(space: &MetricSpace) -> Result<NormalizedSpace, MetricError> {
    space.normalize_diameter()
}

/// Seeded random metric used by tests and examples: shortest paths on a
/// complete graph with uniform edge weights in `[1, 2)`.
pub fn random_graph_metric(n: usize, seed: u64) -> MetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = 1.0 + rng.gen::<f64>();
            d[i * n + j] = w;
            d[j * n + i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    MetricSpace::from_flat(n, d).expect("shortest-path metric is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_triangle_violation_with_witness() {
        let r = MetricSpace::from_rows(&[
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ]);
        assert_eq!(r.unwrap_err(), MetricError::TriangleViolation(0, 2, 1));
    }

    #[test]
    fn rejects_zero_off_diagonal_and_asymmetry() {
        let z = MetricSpace::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(z.unwrap_err(), MetricError::ZeroOffDiagonal(0, 1));
        let a = MetricSpace::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert_eq!(a.unwrap_err(), MetricError::Asymmetry(0, 1));
        let neg = MetricSpace::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]);
        assert_eq!(neg.unwrap_err(), MetricError::NegativeDistance(0, 1));
    }

    #[test]
    fn two_point_ball_and_normalization() {
        let s = MetricSpace::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let mm = MeasuredMetricSpace::counting(s.clone());
        assert_eq!(mm.ball_measure(Ball::new(0, 1.0)), 1.0);
        assert_eq!(mm.ball_measure(Ball::new(0, 2.0)), 2.0);
        let n = s.normalize_diameter().unwrap();
        assert_eq!(n.space.d(0, 1), 1.0);
        assert_eq!(n.scale, 2.0);
    }

    #[test]
    fn single_point_cannot_normalize() {
        let s = MetricSpace::from_rows(&[vec![0.0]]).unwrap();
        assert_eq!(s.normalize_diameter().unwrap_err(), MetricError::SinglePointSpace);
    }

    #[test]
    fn measure_must_be_positive() {
        let s = MetricSpace::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(MeasuredMetricSpace::new(s, vec![1.0, 0.0]).unwrap_err(), MetricError::BadMeasure(1));
    }
}
