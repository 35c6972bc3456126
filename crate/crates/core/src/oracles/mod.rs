//! Exact ground truth used by tests and certificates.
//!
//! The subdominant ultrametric `u_d` is the largest ultrametric below `d`;
//! its entries are minimax path lengths. The least distortion of any
//! ultrametric embedding of a finite space is `max d / u_d`, which makes it
//! the reference every produced embedding is measured against.

mod exact;

pub use exact::{exact_distortion_of_pair, exact_optimal_ultrametric_distortion, exact_subdominant, to_rational};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{MetricSpace, PointId};
use crate::pointset::PointSet;
use crate::ramsey::theta_of_distortion;
use crate::ultrametric::Ultrametric;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("instance of size {size} exceeds the limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("no feasible cover")]
    Infeasible,
    #[error("rho vanishes on the distinct pair ({0}, {1})")]
    DegenerateRho(PointId, PointId),
    #[error("need at least two points")]
    TooFewPoints,
    #[error("domain error: {0}")]
    Domain(String),
}

/// Largest universe accepted by [`min_cost_set_cover`].
pub const MAX_COVER_UNIVERSE: usize = 20;
/// Largest space accepted by [`brute_force_ramsey`].
pub const MAX_BRUTE_FORCE_POINTS: usize = 10;

/// Comparison guard for float oracles.
pub const ORACLE_GUARD: f64 = 1e-12;

/// Subdominant ultrametric on a subset of the points, by single linkage:
/// Prim's algorithm yields a minimum spanning tree, and merging its edges in
/// increasing order assigns each pair the edge at which they first meet.
pub fn subdominant_on(space: &MetricSpace, points: &[PointId]) -> Ultrametric {
    let m = points.len();
    let d = |i: usize, j: usize| space.d(points[i], points[j]);
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(m.saturating_sub(1));
    if m > 1 {
        let mut in_tree = vec![false; m];
        let mut best = vec![(f64::INFINITY, 0usize); m];
        in_tree[0] = true;
        for j in 1..m {
            best[j] = (d(0, j), 0);
        }
        for _ in 1..m {
            let mut next = usize::MAX;
            for j in 0..m {
                if !in_tree[j] && (next == usize::MAX || best[j].0 < best[next].0) {
                    next = j;
                }
            }
            in_tree[next] = true;
            edges.push((best[next].0, best[next].1, next));
            for j in 0..m {
                if !in_tree[j] && d(next, j) < best[j].0 {
                    best[j] = (d(next, j), next);
                }
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut members: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
    let mut comp: Vec<usize> = (0..m).collect();
    let mut u = vec![0.0; m * m];
    for (w, a, b) in edges {
        let (ca, cb) = (comp[a], comp[b]);
        let (keep, gone) = if members[ca].len() >= members[cb].len() { (ca, cb) } else { (cb, ca) };
        let moved = std::mem::take(&mut members[gone]);
        for &x in &members[keep] {
            for &y in &moved {
                u[x * m + y] = w;
                u[y * m + x] = w;
            }
        }
        for &y in &moved {
            comp[y] = keep;
        }
        members[keep].extend(moved);
    }
    Ultrametric::new_unchecked(points.to_vec(), u).expect("square matrix")
}

/// Subdominant ultrametric of the whole space.
pub fn subdominant(space: &MetricSpace) -> Ultrametric {
    let all: Vec<PointId> = (0..space.len()).collect();
    subdominant_on(space, &all)
}

/// The same matrix by the cubic minimax relaxation
/// `u(x, y) = min(u(x, y), max(u(x, z), u(z, y)))`.
pub fn subdominant_minimax(space: &MetricSpace) -> Vec<f64> {
    let n = space.len();
    let mut u = space.as_flat().to_vec();
    for z in 0..n {
        for x in 0..n {
            let xz = u[x * n + z];
            for y in 0..n {
                let via = xz.max(u[z * n + y]);
                if via < u[x * n + y] {
                    u[x * n + y] = via;
                }
            }
        }
    }
    u
}

/// Least distortion of an ultrametric embedding of the listed points:
/// `max d / u_d` over distinct pairs, 1 for fewer than two points.
pub fn optimal_ultrametric_distortion_on(space: &MetricSpace, points: &[PointId]) -> f64 {
    let u = subdominant_on(space, points);
    let mut best = 1.0f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            best = best.max(space.d(points[i], points[j]) / u.get(i, j));
        }
    }
    best
}

pub fn optimal_ultrametric_distortion(space: &MetricSpace) -> f64 {
    let all: Vec<PointId> = (0..space.len()).collect();
    optimal_ultrametric_distortion_on(space, &all)
}

/// Scale-free distortion `(max rho/d) (max d/rho)` of `rho` against `d` on
/// the points `rho` is defined on.
pub fn distortion_of_pair(space: &MetricSpace, rho: &Ultrametric) -> Result<f64, OracleError> {
    let pts = rho.points();
    let (mut expand, mut contract) = (0.0f64, 0.0f64);
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let r = rho.get(i, j);
            if !(r > 0.0) {
                return Err(OracleError::DegenerateRho(pts[i], pts[j]));
            }
            let d = space.d(pts[i], pts[j]);
            expand = expand.max(r / d);
            contract = contract.max(d / r);
        }
    }
    if pts.len() < 2 {
        return Ok(1.0);
    }
    Ok(expand * contract)
}

/// Cheapest cover of `{0, .., universe-1}` by the given `(mask, cost)`
/// sets, by dynamic programming over covered masks.
pub fn min_cost_set_cover(universe: usize, sets: &[(u32, f64)]) -> Result<f64, OracleError> {
    if universe > MAX_COVER_UNIVERSE {
        return Err(OracleError::TooLarge { size: universe, limit: MAX_COVER_UNIVERSE });
    }
    let full: u32 = if universe == 0 { 0 } else { (1u32 << universe) - 1 };
    let mut useful: Vec<(u32, f64)> = sets.iter().map(|&(m, c)| (m & full, c)).filter(|(m, _)| *m != 0).collect();
    // Keep the cheapest set per mask.
    useful.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    useful.dedup_by_key(|s| s.0);
    let mut dp = vec![f64::INFINITY; full as usize + 1];
    dp[0] = 0.0;
    for mask in 0..=full {
        let here = dp[mask as usize];
        if here.is_infinite() {
            continue;
        }
        if mask == full {
            break;
        }
        // Some set has to cover the lowest uncovered element.
        let low = (!mask & full).trailing_zeros();
        for &(s, c) in &useful {
            if s & (1 << low) != 0 {
                let next = (mask | s) as usize;
                if here + c < dp[next] {
                    dp[next] = here + c;
                }
            }
        }
    }
    let best = dp[full as usize];
    if best.is_finite() {
        Ok(best)
    } else {
        Err(OracleError::Infeasible)
    }
}

/// Same minimum by trying every family of sets. At most 20 sets.
pub fn min_cost_set_cover_exhaustive(universe: usize, sets: &[(u32, f64)]) -> Result<f64, OracleError> {
    if sets.len() > 20 {
        return Err(OracleError::TooLarge { size: sets.len(), limit: 20 });
    }
    let full: u32 = if universe == 0 { 0 } else { (1u32 << universe) - 1 };
    let mut best = f64::INFINITY;
    for pick in 0u32..(1u32 << sets.len()) {
        let (mut covered, mut cost) = (0u32, 0.0);
        for (i, &(m, c)) in sets.iter().enumerate() {
            if pick & (1 << i) != 0 {
                covered |= m;
                cost += c;
            }
        }
        if covered & full == full && cost < best {
            best = cost;
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(OracleError::Infeasible)
    }
}

/// Best subset found by [`brute_force_ramsey`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForceRamsey {
    pub subset: PointSet,
    /// `sum_S w^theta(D)`.
    pub value: f64,
    pub theta: f64,
    /// `(sum_X w)^theta(D)`.
    pub bound: f64,
}

/// Maximum of `sum_S w^theta(D)` over subsets embedding into an ultrametric
/// with distortion at most `D`, by enumerating all subsets.
pub fn brute_force_ramsey(space: &MetricSpace, w: &[f64], d: f64) -> Result<BruteForceRamsey, OracleError> {
    let n = space.len();
    if n > MAX_BRUTE_FORCE_POINTS {
        return Err(OracleError::TooLarge { size: n, limit: MAX_BRUTE_FORCE_POINTS });
    }
    let theta = theta_of_distortion(d).map_err(|e| OracleError::Domain(e.to_string()))?;
    brute_force_ramsey_with_exponent(space, w, d, theta)
}

/// As [`brute_force_ramsey`] with the exponent given directly, which also
/// covers `D <= 2` where `theta(D)` is undefined.
pub fn brute_force_ramsey_with_exponent(
    space: &MetricSpace,
    w: &[f64],
    d: f64,
    theta: f64,
) -> Result<BruteForceRamsey, OracleError> {
    let n = space.len();
    if n > MAX_BRUTE_FORCE_POINTS {
        return Err(OracleError::TooLarge { size: n, limit: MAX_BRUTE_FORCE_POINTS });
    }
    let powered: Vec<f64> = w.iter().map(|x| x.powf(theta)).collect();
    let mut best = (f64::NEG_INFINITY, 0u32);
    for mask in 1u32..(1u32 << n) {
        let pts: Vec<PointId> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let value: f64 = pts.iter().map(|&i| powered[i]).sum();
        if value > best.0 && optimal_ultrametric_distortion_on(space, &pts) <= d * (1.0 + ORACLE_GUARD) {
            best = (value, mask);
        }
    }
    Ok(BruteForceRamsey {
        subset: (0..n).filter(|&i| best.1 & (1 << i) != 0).collect(),
        value: best.0,
        theta,
        bound: w.iter().sum::<f64>().powf(theta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(m: usize) -> MetricSpace {
        let n = m + 1;
        let rows: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect()).collect();
        MetricSpace::from_rows(&rows).unwrap()
    }

    #[test]
    fn path_subdominant_and_distortion() {
        let p = path(2);
        let u = subdominant(&p);
        assert_eq!(u.get(0, 2), 1.0);
        assert_eq!(u.as_flat(), subdominant_minimax(&p).as_slice());
        for m in 2..=5 {
            assert_eq!(optimal_ultrametric_distortion(&path(m)), m as f64);
        }
    }

    #[test]
    fn distortion_of_pair_is_scale_free() {
        let p = path(2);
        let rho = Ultrametric::from_fn(vec![0, 1, 2], |i, j| if i.max(j) == 2 { 2.0 } else { 1.0 });
        assert_eq!(distortion_of_pair(&p, &rho).unwrap(), 2.0);
        let u = subdominant(&p).scaled(3.0);
        assert_eq!(distortion_of_pair(&p, &u).unwrap(), 2.0);
        let zero = Ultrametric::from_fn(vec![0, 1], |_, _| 0.0);
        assert!(matches!(distortion_of_pair(&p, &zero), Err(OracleError::DegenerateRho(0, 1))));
    }

    #[test]
    fn set_cover_examples() {
        assert_eq!(min_cost_set_cover(2, &[(0b01, 1.0), (0b10, 1.0), (0b11, 1.5)]).unwrap(), 1.5);
        assert_eq!(min_cost_set_cover(3, &[(0b111, 2.5)]).unwrap(), 2.5);
        assert_eq!(min_cost_set_cover(2, &[(0b01, 1.0)]), Err(OracleError::Infeasible));
        assert!(matches!(min_cost_set_cover(21, &[]), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn brute_force_examples() {
        let mut d = vec![1.0; 16];
        for i in 0..4 {
            d[i * 5] = 0.0;
        }
        let eq = MetricSpace::from_flat(4, d).unwrap();
        let out = brute_force_ramsey(&eq, &[1.0; 4], 3.0).unwrap();
        assert_eq!(out.subset.len(), 4);
        assert!((out.value - 4.0).abs() < 1e-12);

        let p = path(2);
        let theta = theta_of_distortion(8.0).unwrap();
        let out = brute_force_ramsey(&p, &[4.0, 1.0, 1.0], 8.0).unwrap();
        assert!(out.value >= out.bound);
        assert!((out.theta - theta).abs() < 1e-15);

        // Below distortion 2 only pairs and singletons survive on the path.
        let out = brute_force_ramsey_with_exponent(&p, &[4.0, 1.0, 1.0], 1.5, 0.5).unwrap();
        assert_eq!(out.subset.as_slice(), &[0, 1]);
        assert!((out.value - 3.0).abs() < 1e-12);
    }
}
