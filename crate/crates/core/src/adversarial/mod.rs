//! Finite pieces of the lower-bound constructions.
//!
//! A tree of metrics over levels `(n_k, d_k)` lives on tuples
//! `x = (x_1, x_2, ..)` with `rho(x, y) = d_k(x_k, y_k) / prod_(i<k) n_i^(1/alpha)`
//! for the first index `k` where the tuples differ. Levels built from
//! expanders or from `G(n, 1/2)` give spaces where every large subset is far
//! from an ultrametric.

mod graphs;

pub use graphs::{
    expander_fractal_level, gnhalf_fractal_level, largest_cluster_subset, ExpanderLevel, EXPANDER_MAX_ATTEMPTS,
    MAX_CLUSTER_SEARCH,
};

use num::rational::Ratio;
use num::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{MetricError, MetricSpace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversarialError {
    #[error("level {level} violates the specification: {reason}")]
    SpecViolation { level: usize, reason: String },
    #[error("{size} points exceed the limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("n^(1/alpha) = {growth} does not exceed the diameter bound {diameter}")]
    AdmissibilityFailure { growth: f64, diameter: f64 },
    #[error("no admissible expander after {0} samples")]
    ExpanderSamplingTimeout(usize),
    #[error("invalid order {0}")]
    InvalidOrder(usize),
    #[error("distances must all be 1 or 2")]
    NotTwoValued,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Largest truncation [`product_tree_truncation`] builds.
pub const MAX_TRUNCATION_POINTS: usize = 10_000;
/// Largest truncation whose triangle inequality is checked on all triples.
pub const MAX_VALIDATED_POINTS: usize = 500;
/// Largest number of minimal prefix covers [`prefix_cover_check`] enumerates.
pub const MAX_PREFIX_COVERS: usize = 1_000_000;

/// One level: a metric on `n` points with diameter 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub n: usize,
    pub dist: Vec<f64>,
}

impl LevelSpec {
    /// Smallest positive distance.
    pub fn delta(&self) -> f64 {
        self.dist.iter().copied().filter(|&d| d > 0.0).fold(f64::INFINITY, f64::min)
    }

    /// Two points at distance 1.
    pub fn pair() -> Self {
        LevelSpec { n: 2, dist: vec![0.0, 1.0, 1.0, 0.0] }
    }

    /// `n` points, all at distance 1.
    pub fn equilateral(n: usize) -> Self {
        let dist = (0..n * n).map(|e| if e / n == e % n { 0.0 } else { 1.0 }).collect();
        LevelSpec { n, dist }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductTreeSpec {
    pub alpha: f64,
    pub levels: Vec<LevelSpec>,
}

impl ProductTreeSpec {
    /// The same level repeated `depth` times.
    pub fn constant(alpha: f64, level: LevelSpec, depth: usize) -> Self {
        ProductTreeSpec { alpha, levels: vec![level; depth] }
    }

    /// Every level is a valid metric of diameter 1 on at least two points,
    /// with `delta_k > n_k^(-1/alpha)`.
    pub fn validate(&self) -> Result<(), AdversarialError> {
        if !(self.alpha > 0.0) {
            return Err(AdversarialError::SpecViolation { level: 0, reason: "alpha must be positive".into() });
        }
        for (i, l) in self.levels.iter().enumerate() {
            let fail = |reason: String| AdversarialError::SpecViolation { level: i, reason };
            if l.n < 2 || l.dist.len() != l.n * l.n {
                return Err(fail(format!("needs n >= 2 and an n x n matrix, got n = {}", l.n)));
            }
            let space = MetricSpace::from_flat(l.n, l.dist.clone()).map_err(|e| fail(e.to_string()))?;
            if space.diameter() != 1.0 {
                return Err(fail(format!("diameter {} is not 1", space.diameter())));
            }
            let floor = (l.n as f64).powf(-1.0 / self.alpha);
            if l.delta() <= floor {
                return Err(fail(format!("delta = {} <= n^(-1/alpha) = {floor}", l.delta())));
            }
        }
        Ok(())
    }
}

/// The first `depth` levels of a tree of metrics.
#[derive(Clone, Debug)]
pub struct TruncatedFractal {
    pub depth: usize,
    /// Coordinates of each point, in lexicographic order.
    pub coords: Vec<Vec<usize>>,
    pub space: MetricSpace,
    /// Whether all triples were checked.
    pub validated: bool,
}

/// Builds the truncation at `depth` levels. All triples are validated up to
/// [`MAX_VALIDATED_POINTS`] points.
pub fn product_tree_truncation(spec: &ProductTreeSpec, depth: usize) -> Result<TruncatedFractal, AdversarialError> {
    spec.validate()?;
    if depth == 0 || depth > spec.levels.len() {
        return Err(AdversarialError::SpecViolation {
            level: depth,
            reason: format!("depth must be in 1..={}", spec.levels.len()),
        });
    }
    let levels = &spec.levels[..depth];
    let mut size: usize = 1;
    for l in levels {
        size = size.saturating_mul(l.n);
        if size > MAX_TRUNCATION_POINTS {
            return Err(AdversarialError::TooLarge { size, limit: MAX_TRUNCATION_POINTS });
        }
    }
    let mut coords: Vec<Vec<usize>> = vec![Vec::new()];
    for l in levels {
        coords = coords
            .into_iter()
            .flat_map(|c| {
                (0..l.n).map(move |j| {
                    let mut c = c.clone();
                    c.push(j);
                    c
                })
            })
            .collect();
    }
    // scale[k] = prod_(i<k) n_i^(-1/alpha)
    let mut scale = vec![1.0; depth];
    for k in 1..depth {
        scale[k] = scale[k - 1] * (levels[k - 1].n as f64).powf(-1.0 / spec.alpha);
    }
    let n = coords.len();
    let mut dist = vec![0.0; n * n];
    for a in 0..n {
        for b in (a + 1)..n {
            let k = (0..depth).find(|&k| coords[a][k] != coords[b][k]).expect("distinct tuples");
            let l = &levels[k];
            let v = l.dist[coords[a][k] * l.n + coords[b][k]] * scale[k];
            dist[a * n + b] = v;
            dist[b * n + a] = v;
        }
    }
    let validated = n <= MAX_VALIDATED_POINTS;
    let space = if validated { MetricSpace::from_flat(n, dist)? } else { MetricSpace::from_flat_unchecked(n, dist) };
    Ok(TruncatedFractal { depth, coords, space, validated })
}

/// Outcome of [`prefix_cover_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrefixCoverReport {
    pub covers: usize,
    /// Smallest `sum 1 / prod_(i<=k_j) n_i` over minimal covers, as `(num, den)`.
    pub min_sum: (u64, u64),
    pub ok: bool,
}

/// Enumerates every minimal cover of the depth-`depth` tuples by prefix
/// cubes and checks that the reciprocal sizes add up to at least 1, in
/// exact rational arithmetic.
pub fn prefix_cover_check(spec: &ProductTreeSpec, depth: usize) -> Result<PrefixCoverReport, AdversarialError> {
    if depth > spec.levels.len() {
        return Err(AdversarialError::SpecViolation { level: depth, reason: "depth exceeds the levels".into() });
    }
    let ns: Vec<u64> = spec.levels[..depth].iter().map(|l| l.n as u64).collect();
    // count[k]: minimal covers of one cube at depth k.
    let mut count = vec![1usize; depth + 1];
    for k in (0..depth).rev() {
        let below = (count[k + 1] as f64).powi(ns[k] as i32);
        if below + 1.0 > MAX_PREFIX_COVERS as f64 {
            return Err(AdversarialError::TooLarge { size: below as usize, limit: MAX_PREFIX_COVERS });
        }
        count[k] = 1 + count[k + 1].pow(ns[k] as u32);
    }
    // sums[k]: the cover sums of one depth-k cube, as multisets of values.
    let mut weight = vec![Ratio::new(1u64, 1u64); depth + 1];
    for k in 1..=depth {
        weight[k] = weight[k - 1] / ns[k - 1];
    }
    let mut sums: Vec<Ratio<u64>> = vec![weight[depth]];
    for k in (0..depth).rev() {
        let mut combos = vec![Ratio::zero()];
        for _ in 0..ns[k] {
            combos = combos.iter().flat_map(|a| sums.iter().map(move |b| a + b)).collect();
        }
        combos.push(weight[k]);
        sums = combos;
    }
    let one = Ratio::new(1u64, 1u64);
    let min = sums.iter().min().copied().expect("at least one cover");
    Ok(PrefixCoverReport {
        covers: sums.len(),
        min_sum: (*min.numer(), *min.denom()),
        ok: sums.iter().all(|s| *s >= one),
    })
}
