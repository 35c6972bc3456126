use serde::{Deserialize, Serialize};

use crate::metric::{PointId, MetricSpace};
use crate::pointset::PointSet;

/// One carved piece: the live points within `r` of `center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub center: PointId,
    pub points: PointSet,
}

/// Result of one carving pass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarveOutcome {
    pub pieces: Vec<Piece>,
    /// `sum over captured x of f(x) mu(x) mu(B(x,R)) / mu(B(x,r))`.
    pub gained: f64,
    /// `sum over the input set of f(x) mu(x)`.
    pub spent: f64,
    /// Largest `|sum A mu - sum B mu|` seen before a pick, relative to the
    /// common value, when auditing. Zero otherwise.
    pub max_identity_residual: f64,
}

/// Ball measures `mu(B(x, t))` for every point.
pub fn ball_measures(space: &MetricSpace, mu: &[f64], t: f64) -> Vec<f64> {
    (0..space.len())
        .map(|x| {
            let row = space.row(x);
            row.iter().zip(mu).filter(|(d, _)| **d <= t).map(|(_, m)| *m).sum()
        })
        .collect()
}

/// Carves the live set into pieces of radius `r` separated by `big_r - r`.
///
/// Every center `y` carries `A(y)`, the sum of `a = f mu mu(B(.,R))/mu(B(.,r))`
/// over live points within `r`, and `B(y)`, the sum of `b = f mu` over live
/// points within `R`. Since `sum_y mu(y) A(y) = sum_y mu(y) B(y)`, some center
/// whose `R`-ball still meets the live set has `A >= B`. The center with the
/// largest `A - B` (smallest index on ties) captures its `r`-ball and
/// removes its `R`-ball from the live set. Hence `gained >= spent`, up to
/// rounding in the last place.
pub fn carve(
    space: &MetricSpace,
    mu: &[f64],
    live: &[bool],
    f: &[f64],
    r: f64,
    big_r: f64,
    audit: bool,
) -> CarveOutcome {
    let n = space.len();
    let mu_r = ball_measures(space, mu, r);
    let mu_big = ball_measures(space, mu, big_r);
    let a: Vec<f64> = (0..n).map(|x| f[x] * mu[x] * mu_big[x] / mu_r[x]).collect();
    let b: Vec<f64> = (0..n).map(|x| f[x] * mu[x]).collect();
    let mut alive = live.to_vec();
    let spent: f64 = (0..n).filter(|&x| alive[x]).map(|x| b[x]).sum();

    let mut sum_a = vec![0.0; n];
    let mut sum_b = vec![0.0; n];
    let mut reach = vec![0usize; n];
    for y in 0..n {
        let row = space.row(y);
        for x in 0..n {
            if alive[x] {
                if row[x] <= r {
                    sum_a[y] += a[x];
                }
                if row[x] <= big_r {
                    sum_b[y] += b[x];
                    reach[y] += 1;
                }
            }
        }
    }

    let mut pieces = Vec::new();
    let mut gained = 0.0;
    let mut residual = 0.0f64;
    loop {
        if audit {
            residual = residual.max(identity_residual(space, mu, &alive, &a, &b, r, big_r));
        }
        let mut best: Option<PointId> = None;
        for y in 0..n {
            if reach[y] > 0 && best.is_none_or(|c| sum_a[y] - sum_b[y] > sum_a[c] - sum_b[c]) {
                best = Some(y);
            }
        }
        let Some(y) = best else { break };
        let row = space.row(y);
        let captured: Vec<PointId> = (0..n).filter(|&x| alive[x] && row[x] <= r).collect();
        gained += captured.iter().map(|&x| a[x]).sum::<f64>();
        let removed: Vec<PointId> = (0..n).filter(|&x| alive[x] && row[x] <= big_r).collect();
        for &x in &removed {
            alive[x] = false;
            let rx = space.row(x);
            for z in 0..n {
                if rx[z] <= r {
                    sum_a[z] -= a[x];
                }
                if rx[z] <= big_r {
                    sum_b[z] -= b[x];
                    reach[z] -= 1;
                }
            }
        }
        if !captured.is_empty() {
            pieces.push(Piece { center: y, points: PointSet::from_unsorted(captured) });
        }
    }
    CarveOutcome { pieces, gained, spent, max_identity_residual: residual }
}

/// `|sum_y mu(y) A(y) - sum_y mu(y) B(y)|` recomputed from scratch, divided
/// by the larger side (or 1 when both vanish).
fn identity_residual(space: &MetricSpace, mu: &[f64], alive: &[bool], a: &[f64], b: &[f64], r: f64, big_r: f64) -> f64 {
    let n = space.len();
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for y in 0..n {
        let row = space.row(y);
        let (mut ay, mut by) = (0.0, 0.0);
        for x in 0..n {
            if alive[x] {
                if row[x] <= r {
                    ay += a[x];
                }
                if row[x] <= big_r {
                    by += b[x];
                }
            }
        }
        lhs += mu[y] * ay;
        rhs += mu[y] * by;
    }
    let scale = f64::max(lhs.abs().max(rhs.abs()), f64::MIN_POSITIVE);
    if lhs == 0.0 && rhs == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}
