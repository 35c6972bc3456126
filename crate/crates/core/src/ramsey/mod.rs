//! Weighted metric Ramsey subsets.
//!
//! [`ramsey_subset`] finds `S` embedding into an ultrametric with
//! distortion `D(eps) = 2 / (eps (1 - eps)^((1 - eps) / eps))` and
//! `(sum_S w1) (sum_X w2)^eps >= sum_X w1 w2^eps`. The construction carves
//! the space at radii `r_n = c sigma^(n + delta)` with
//! `sigma = (1 - eps)^(1/eps)`, for a shift `delta` in `[0, 1)`. The
//! guarantee holds on average over the shift; the derandomized mode scans
//! every interval on which the outcome is constant and keeps the best one.

mod carve;
mod theta;

pub use carve::{ball_measures, carve, CarveOutcome, Piece};
pub use theta::{distortion_for_epsilon, theta_inverse, theta_of_distortion, theta_profile};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{MetricSpace, PointId};
use crate::pointset::PointSet;
use crate::ultrametric::Ultrametric;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RamseyError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("weights: {0}")]
    BadWeights(String),
}

/// Relative tolerance for comparing the achieved distortion with `D`.
pub const DISTORTION_SLACK: f64 = 1e-12;

/// How the radius shift is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ShiftMode {
    /// Scan all constant-outcome intervals and keep the best.
    Derandomized,
    /// Draw the shift from a seeded ChaCha8 generator.
    Sampled { seed: u64 },
}

/// Radii `r_n = scale * sigma^(n + shift)` and outer radii
/// `R_n = r_n + 2 r_(n-1) / D`. The scale is `diam / (2 sigma)`, so
/// `diam <= 2 r_0` whatever the shift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiiSchedule {
    pub eps: f64,
    pub sigma: f64,
    pub scale: f64,
    pub shift: f64,
    pub distortion: f64,
}

impl RadiiSchedule {
    pub fn new(eps: f64, diameter: f64, shift: f64) -> Self {
        let sigma = (1.0 - eps).powf(1.0 / eps);
        RadiiSchedule { eps, sigma, scale: diameter / (2.0 * sigma), shift, distortion: distortion_for_epsilon(eps) }
    }

    pub fn r(&self, n: usize) -> f64 {
        self.scale * ((n as f64 + self.shift) * self.sigma.ln()).exp()
    }

    pub fn outer(&self, n: usize) -> f64 {
        self.r(n) + 2.0 * self.r(n - 1) / self.distortion
    }

    /// First stage whose outer radius is below `min_distance`; from there on
    /// every piece is a single point.
    pub fn cutoff(&self, min_distance: f64) -> usize {
        let mut n = 1;
        while self.outer(n) >= min_distance {
            n += 1;
        }
        n
    }

    /// Shifts at which some `r_n` or `R_n` crosses a value in `ts`, i.e. the
    /// fractional parts of `log_sigma(t / scale)` and
    /// `log_sigma(t (1 - eps) / scale)`. Sorted and deduplicated.
    pub fn breakpoints(eps: f64, diameter: f64, ts: &[f64]) -> Vec<f64> {
        let s = RadiiSchedule::new(eps, diameter, 0.0);
        let ls = s.sigma.ln();
        let mut out: Vec<f64> = ts
            .iter()
            .flat_map(|&t| [t, t * (1.0 - eps)])
            .map(|t| {
                let u = (t / s.scale).ln() / ls;
                u - u.floor()
            })
            .filter(|b| *b > 0.0 && *b < 1.0)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// One run of the staged carving at a fixed shift.
#[derive(Clone, Debug)]
pub struct StagedRun {
    pub schedule: RadiiSchedule,
    pub stages: usize,
    /// Piece index of each point at each stage `1..=stages`, `usize::MAX`
    /// for points no longer alive.
    pub labels: Vec<Vec<usize>>,
    pub survivors: Vec<bool>,
    /// `sum over survivors of w1`.
    pub value: f64,
    /// Largest averaging-identity residual over all stages, when audited.
    pub max_identity_residual: f64,
    /// Per stage, `gained >= spent` as reported by the carve.
    pub stage_balance: Vec<(f64, f64)>,
}

struct Context<'a> {
    space: &'a MetricSpace,
    w1: &'a [f64],
    mu: &'a [f64],
    ratio: Vec<f64>,
    eps: f64,
    diameter: f64,
    min_distance: f64,
}

impl Context<'_> {
    fn run(&self, shift: f64, audit: bool) -> StagedRun {
        let n = self.space.len();
        let sched = RadiiSchedule::new(self.eps, self.diameter, shift);
        let big_n = sched.cutoff(self.min_distance);
        // log of mu(B(x, r_m)) / mu(B(x, R_m)) for m = 1..=N.
        let log_ratio: Vec<Vec<f64>> = (1..=big_n)
            .map(|m| {
                let inner = ball_measures(self.space, self.mu, sched.r(m));
                let outer = ball_measures(self.space, self.mu, sched.outer(m));
                inner.iter().zip(&outer).map(|(a, b)| (a / b).ln()).collect()
            })
            .collect();
        // suffix[m][x] = sum over stages m..=N, so f_m = w * exp(suffix[m]).
        let mut suffix = vec![vec![0.0; n]; big_n + 2];
        for m in (1..=big_n).rev() {
            for x in 0..n {
                suffix[m][x] = suffix[m + 1][x] + log_ratio[m - 1][x];
            }
        }
        let mut live = vec![true; n];
        let mut labels = Vec::with_capacity(big_n);
        let mut residual = 0.0f64;
        let mut balance = Vec::with_capacity(big_n);
        for m in 1..=big_n {
            let f: Vec<f64> = (0..n).map(|x| self.ratio[x] * suffix[m][x].exp()).collect();
            let out = carve(self.space, self.mu, &live, &f, sched.r(m), sched.outer(m), audit);
            residual = residual.max(out.max_identity_residual);
            balance.push((out.gained, out.spent));
            let mut lab = vec![usize::MAX; n];
            for (i, piece) in out.pieces.iter().enumerate() {
                for p in piece.points.iter() {
                    lab[p] = i;
                }
            }
            for x in 0..n {
                live[x] = lab[x] != usize::MAX;
            }
            labels.push(lab);
        }
        let value = (0..n).filter(|&x| live[x]).map(|x| self.w1[x]).sum();
        StagedRun {
            schedule: sched,
            stages: big_n,
            labels,
            survivors: live,
            value,
            max_identity_residual: residual,
            stage_balance: balance,
        }
    }

    /// `rho(x, y) = 2 r_(n-1)` for the first stage `n` that separates x and y.
    fn ultrametric(&self, run: &StagedRun) -> Ultrametric {
        let pts: Vec<PointId> = (0..self.space.len()).filter(|&x| run.survivors[x]).collect();
        let sched = run.schedule;
        Ultrametric::from_fn(pts.clone(), |i, j| {
            let (x, y) = (pts[i], pts[j]);
            let n = (0..run.stages)
                .find(|&s| run.labels[s][x] != run.labels[s][y])
                .expect("the last stage separates all pairs")
                + 1;
            2.0 * sched.r(n - 1)
        })
    }
}

/// Evidence attached to a Ramsey subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseyCertificate {
    /// The shift interval the chosen shift came from (derandomized), or
    /// `(shift, shift)` when sampled.
    pub shift_interval: (f64, f64),
    pub shift: f64,
    /// `sum_S w1`.
    pub achieved: f64,
    /// `sum_X w1 w2^eps / (sum_X w2)^eps`.
    pub required: f64,
    /// Exact average of `sum_S w1` over the shift, derandomized mode only.
    pub expectation: Option<f64>,
    /// `max rho/d * max d/rho` on `S`.
    pub distortion: f64,
    /// `D(eps)`.
    #[serde(rename = "D")]
    pub distortion_bound: f64,
    /// `d <= rho <= D d` holds on every pair, up to relative `1e-12`.
    pub embedding_ok: bool,
    pub ok: bool,
}

/// A Ramsey subset with its ultrametric and certificate.
#[derive(Clone, Debug)]
pub struct RamseyOutcome {
    pub subset: PointSet,
    pub ultrametric: Ultrametric,
    pub certificate: RamseyCertificate,
    pub run: StagedRun,
}

fn check_weights(n: usize, w1: &[f64], w2: &[f64]) -> Result<(), RamseyError> {
    if w1.len() != n || w2.len() != n {
        return Err(RamseyError::BadWeights(format!("expected {n} weights")));
    }
    if w1.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(RamseyError::BadWeights("w1 must be finite and nonnegative".into()));
    }
    if w2.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(RamseyError::BadWeights("w2 must be finite and positive".into()));
    }
    Ok(())
}

/// Checks `d <= rho <= D d` and returns `(max rho/d) * (max d/rho)`.
pub fn embedding_check(space: &MetricSpace, u: &Ultrametric, bound: f64) -> (bool, f64) {
    let pts = u.points();
    let (mut expand, mut contract) = (1.0f64, 1.0f64);
    let mut ok = true;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = space.d(pts[i], pts[j]);
            let rho = u.get(i, j);
            expand = expand.max(rho / d);
            contract = contract.max(d / rho);
            if d > rho || rho > bound * d * (1.0 + DISTORTION_SLACK) {
                ok = false;
            }
        }
    }
    (ok, expand * contract)
}

/// Two-weight Ramsey subset at parameter `eps`.
pub fn ramsey_subset(
    space: &MetricSpace,
    w1: &[f64],
    w2: &[f64],
    eps: f64,
    mode: ShiftMode,
) -> Result<RamseyOutcome, RamseyError> {
    ramsey_subset_audited(space, w1, w2, eps, mode, false)
}

/// As [`ramsey_subset`], optionally recomputing the averaging identity
/// before every carving pick (slow, for tests).
pub fn ramsey_subset_audited(
    space: &MetricSpace,
    w1: &[f64],
    w2: &[f64],
    eps: f64,
    mode: ShiftMode,
    audit: bool,
) -> Result<RamseyOutcome, RamseyError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(RamseyError::DomainError(format!("eps = {eps} is not in (0, 1)")));
    }
    let n = space.len();
    check_weights(n, w1, w2)?;
    let total2: f64 = w2.iter().sum();
    let required: f64 = (0..n).map(|x| w1[x] * (w2[x] / total2).powf(eps)).sum();
    let bound = distortion_for_epsilon(eps);
    if n == 1 {
        let u = Ultrametric::from_fn(vec![0], |_, _| 0.0);
        let run = StagedRun {
            schedule: RadiiSchedule::new(eps, 0.0, 0.0),
            stages: 0,
            labels: Vec::new(),
            survivors: vec![true],
            value: w1[0],
            max_identity_residual: 0.0,
            stage_balance: Vec::new(),
        };
        let certificate = RamseyCertificate {
            shift_interval: (0.0, 1.0),
            shift: 0.5,
            achieved: w1[0],
            required,
            expectation: Some(w1[0]),
            distortion: 1.0,
            distortion_bound: bound,
            embedding_ok: true,
            ok: true,
        };
        return Ok(RamseyOutcome { subset: PointSet::singleton(0), ultrametric: u, certificate, run });
    }
    let ctx = Context {
        space,
        w1,
        mu: w2,
        ratio: (0..n).map(|x| w1[x] / w2[x]).collect(),
        eps,
        diameter: space.diameter(),
        min_distance: space.min_distance(),
    };
    let (run, interval, expectation) = match mode {
        ShiftMode::Sampled { seed } => {
            let shift = ChaCha8Rng::seed_from_u64(seed).gen::<f64>();
            (ctx.run(shift, audit), (shift, shift), None)
        }
        ShiftMode::Derandomized => {
            let mut cuts = vec![0.0];
            cuts.extend(RadiiSchedule::breakpoints(eps, ctx.diameter, &space.distinct_distances()));
            cuts.push(1.0);
            let intervals: Vec<(f64, f64)> =
                cuts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect();
            let runs: Vec<StagedRun> = intervals
                .par_iter()
                .map(|&(a, b)| ctx.run(0.5 * (a + b), audit))
                .collect();
            let expectation: f64 = intervals.iter().zip(&runs).map(|((a, b), r)| (b - a) * r.value).sum();
            let mut best = 0;
            for i in 1..runs.len() {
                if runs[i].value > runs[best].value {
                    best = i;
                }
            }
            let run = runs.into_iter().nth(best).expect("at least one interval");
            (run, intervals[best], Some(expectation))
        }
    };
    let ultrametric = ctx.ultrametric(&run);
    let (embedding_ok, distortion) = embedding_check(space, &ultrametric, bound);
    let achieved = run.value;
    let ok = embedding_ok && achieved >= required * (1.0 - 1e-12);
    let certificate = RamseyCertificate {
        shift_interval: interval,
        shift: run.schedule.shift,
        achieved,
        required,
        expectation,
        distortion,
        distortion_bound: bound,
        embedding_ok,
        ok,
    };
    let subset = PointSet::from_unsorted(ultrametric.points().to_vec());
    Ok(RamseyOutcome { subset, ultrametric, certificate, run })
}

/// Weighted Dvoretzky-type subset at distortion `D`: runs the two-weight
/// construction with `eps = 1 - theta(D)`, `w1 = w^theta`, `w2 = w`, so that
/// `sum_S w^theta >= (sum_X w)^theta`.
#[derive(Clone, Debug)]
pub struct DvoretzkyOutcome {
    pub subset: PointSet,
    pub ultrametric: Ultrametric,
    pub theta: f64,
    /// `sum_S w^theta`.
    pub lhs: f64,
    /// `(sum_X w)^theta`.
    pub rhs: f64,
    pub certificate: RamseyCertificate,
}

pub fn dvoretzky_subset(space: &MetricSpace, w: &[f64], d: f64) -> Result<DvoretzkyOutcome, RamseyError> {
    let theta = theta_of_distortion(d)?;
    let w1: Vec<f64> = w.iter().map(|x| x.powf(theta)).collect();
    let out = ramsey_subset(space, &w1, w, 1.0 - theta, ShiftMode::Derandomized)?;
    let lhs = out.certificate.achieved;
    let rhs = w.iter().sum::<f64>().powf(theta);
    Ok(DvoretzkyOutcome {
        subset: out.subset,
        ultrametric: out.ultrametric,
        theta,
        lhs,
        rhs,
        certificate: out.certificate,
    })
}
