//! Ball-cover check for a skeleton: every cover of `S*` by balls
//! `B(x_i, r_i)` satisfies `sum mu(B(x_i, c r_i))^s >= mu(X)^s`, where
//! `c = 1 + 2 K^2 gamma`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SkeletonError, SkeletonResult};
use crate::metric::{Ball, MeasuredMetricSpace, PointId};
use crate::oracles::{min_cost_set_cover, MAX_COVER_UNIVERSE};

/// Relative slack on the final comparison.
pub const COVER_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum CoverMode {
    /// Minimum over all covers by balls with radii in `{0} u d(x, S*)`.
    Exact,
    /// Minimum over random covers plus the singleton cover.
    Sampled { seed: u64, samples: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverVerdict {
    pub mode: CoverMode,
    pub exponent: f64,
    /// `mu(X)^s`.
    pub bound: f64,
    /// `sum over S* of mu(x)^s`, the cover by radius-0 balls.
    pub singleton_sum: f64,
    /// Cheapest cover found.
    pub min_cost: f64,
    pub inflation_log: f64,
    /// The inflation turns every ball of positive radius into `X`.
    pub trivialized: bool,
    pub ok: bool,
}

struct CostModel<'a> {
    x: &'a MeasuredMetricSpace,
    s: f64,
    inflation_log: f64,
    log_diam: f64,
}

impl CostModel<'_> {
    fn cost(&self, center: PointId, r: f64) -> f64 {
        let inflated = if r == 0.0 {
            0.0
        } else if self.inflation_log + r.ln() >= self.log_diam {
            f64::INFINITY
        } else {
            r * self.inflation_log.exp()
        };
        let m = if inflated.is_infinite() { self.x.total() } else { self.x.ball_measure(Ball::new(center, inflated)) };
        m.powf(self.s)
    }
}

/// Checks the cover inequality for the skeleton's subset against `x`, the
/// space the skeleton was built on, at exponent `s`.
pub fn verify_cover(
    result: &SkeletonResult,
    x: &MeasuredMetricSpace,
    s: f64,
    mode: CoverMode,
) -> Result<CoverVerdict, SkeletonError> {
    verify_cover_subset(result.subset.as_slice(), result.params.cover_const_log, x, s, mode)
}

/// As [`verify_cover`], for a bare subset and inflation `exp(inflation_log)`.
pub fn verify_cover_subset(
    subset: &[PointId],
    inflation_log: f64,
    x: &MeasuredMetricSpace,
    s: f64,
    mode: CoverMode,
) -> Result<CoverVerdict, SkeletonError> {
    let model = CostModel { x, s, inflation_log, log_diam: x.space.diameter().ln() };
    let bound = x.total().powf(s);
    let singleton_sum: f64 = subset.iter().map(|&p| x.mu[p].powf(s)).sum();
    let min_positive = x.space.min_distance();
    let trivialized = x.len() < 2 || inflation_log + min_positive.ln() >= model.log_diam;

    let min_cost = match mode {
        CoverMode::Exact => {
            let m = subset.len();
            if m > MAX_COVER_UNIVERSE {
                return Err(SkeletonError::TooLargeForExact(m));
            }
            let mut sets = Vec::new();
            for c in 0..x.len() {
                let row = x.space.row(c);
                let mut radii: Vec<f64> = std::iter::once(0.0).chain(subset.iter().map(|&y| row[y])).collect();
                radii.sort_by(f64::total_cmp);
                radii.dedup();
                for r in radii {
                    let mask = subset
                        .iter()
                        .enumerate()
                        .filter(|(_, &y)| row[y] <= r)
                        .fold(0u32, |acc, (i, _)| acc | (1 << i));
                    if mask != 0 {
                        sets.push((mask, model.cost(c, r)));
                    }
                }
            }
            min_cost_set_cover(m, &sets).map_err(|e| SkeletonError::Cover(e.to_string()))?
        }
        CoverMode::Sampled { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best = singleton_sum;
            for _ in 0..samples {
                let mut uncovered: Vec<PointId> = subset.to_vec();
                let mut total = 0.0;
                while let Some(&y) = uncovered.choose(&mut rng) {
                    let c = rng.gen_range(0..x.len());
                    let row = x.space.row(c);
                    let reach: Vec<f64> = subset.iter().map(|&z| row[z]).filter(|&d| d >= row[y]).collect();
                    let r = *reach.choose(&mut rng).expect("y itself is reachable");
                    total += model.cost(c, r);
                    uncovered.retain(|&z| row[z] > r);
                }
                best = best.min(total);
            }
            best
        }
    };
    let ok = min_cost >= bound * (1.0 - COVER_SLACK);
    Ok(CoverVerdict { mode, exponent: s, bound, singleton_sum, min_cost, inflation_log, trivialized, ok })
}
