use serde::{Deserialize, Serialize};

use super::SkeletonError;
use crate::ramsey::{theta_inverse, theta_of_distortion};

/// How the pipeline parameters were chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ParamMode {
    /// Exponent `1 - eps` at distortion `O(1/eps)`.
    Epsilon { eps: f64 },
    /// Distortion `2 + delta` with `k = 2`.
    Delta { delta: f64 },
    /// `D`, `k` and `tau` given directly.
    Raw,
}

/// Every constant the pipeline uses, derived once.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub mode: ParamMode,
    pub k: usize,
    /// Block height, `2 k^2`.
    pub h: usize,
    pub tau: f64,
    /// Target distortion.
    #[serde(rename = "D")]
    pub d: f64,
    /// Distortion handed to each composition step, `D (1 - 3 tau) / (1 + tau)`.
    #[serde(rename = "D_prime")]
    pub d_prime: f64,
    /// Separation of the S vertices, `(1 - 3 tau) / (2 tau)`.
    pub beta: f64,
    /// `theta(D')`.
    pub theta: f64,
    /// `(1 - 1/k)^2`.
    pub t2: f64,
    /// Cut-set exponent `(1 - 1/k)^2 theta(D')`.
    pub s: f64,
    /// `log(2 tau^(-4k^2) / (1 - 3 tau))`.
    #[serde(rename = "K_log")]
    pub log_k: f64,
    /// `log(tau^(-4k^2))`.
    pub gamma_log: f64,
    /// `log(1 + 2 K^2 gamma)`.
    pub cover_const_log: f64,
    /// Set when `tau = delta / 10` replaced `delta / 9`.
    pub tau_substituted: bool,
    /// Skip the composition and keep the S-map ultrametric.
    pub simple: bool,
}

/// `log(1 + e^x)` without overflow.
fn log1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

impl PipelineParams {
    /// Direct parameters. Needs `D > 2`, `k >= 2` and
    /// `0 < tau < (D - 2) / (3D + 2)`.
    pub fn raw(d: f64, k: usize, tau: f64) -> Result<Self, SkeletonError> {
        Self::build(ParamMode::Raw, d, k, tau, false)
    }

    fn build(mode: ParamMode, d: f64, k: usize, tau: f64, tau_substituted: bool) -> Result<Self, SkeletonError> {
        if !(d.is_finite() && d > 2.0) {
            return Err(SkeletonError::ParamOutOfRange(format!("D = {d} must exceed 2")));
        }
        if k < 2 {
            return Err(SkeletonError::ParamOutOfRange(format!("k = {k} must be at least 2")));
        }
        let tau_max = (d - 2.0) / (3.0 * d + 2.0);
        if !(tau > 0.0 && tau < tau_max) {
            return Err(SkeletonError::ParamOutOfRange(format!("tau = {tau} is not in (0, {tau_max})")));
        }
        let d_prime = d * (1.0 - 3.0 * tau) / (1.0 + tau);
        let theta = theta_of_distortion(d_prime)?;
        let t1 = 1.0 - 1.0 / k as f64;
        let t2 = t1 * t1;
        let gamma_log = -4.0 * (k * k) as f64 * tau.ln();
        let log_k = 2f64.ln() - (1.0 - 3.0 * tau).ln() + gamma_log;
        Ok(PipelineParams {
            mode,
            k,
            h: 2 * k * k,
            tau,
            d,
            d_prime,
            beta: (1.0 - 3.0 * tau) / (2.0 * tau),
            theta,
            t2,
            s: t2 * theta,
            log_k,
            gamma_log,
            cover_const_log: log1p_exp(2f64.ln() + 2.0 * log_k + gamma_log),
            tau_substituted,
            simple: false,
        })
    }

    /// `k = ceil(10/eps)`, `tau = 1/20` and `D` chosen so that the cut-set
    /// exponent is exactly `1 - eps`.
    pub fn from_epsilon(eps: f64) -> Result<Self, SkeletonError> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(SkeletonError::ParamOutOfRange(format!("eps = {eps} is not in (0, 1)")));
        }
        let k = (10.0 / eps).ceil() as usize;
        let tau = 1.0 / 20.0;
        let t1 = 1.0 - 1.0 / k as f64;
        let d = (1.0 + tau) / (1.0 - 3.0 * tau) * theta_inverse((1.0 - eps) / (t1 * t1));
        Self::build(ParamMode::Epsilon { eps }, d, k, tau, false)
    }

    /// `D = 2 + delta`, `k = 2`, `tau = delta / 9`. For `delta` in
    /// `[1/3, 1/2)` the choice `delta / 9` leaves the admissible range and
    /// `delta / 10` is used instead, with `tau_substituted` set.
    pub fn from_delta(delta: f64) -> Result<Self, SkeletonError> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(SkeletonError::DeltaOutOfRange(delta));
        }
        let substituted = delta >= 1.0 / 3.0;
        let tau = if substituted { delta / 10.0 } else { delta / 9.0 };
        Self::build(ParamMode::Delta { delta }, 2.0 + delta, 2, tau, substituted)
    }

    pub fn with_simple(mut self, simple: bool) -> Self {
        self.simple = simple;
        self
    }

    /// Exponent certified by the chosen variant: `s`, or `(1 - 1/k)^2` for
    /// the simple variant, whose cut-set weights add up exactly.
    pub fn exponent(&self) -> f64 {
        if self.simple {
            self.t2
        } else {
            self.s
        }
    }

    /// Log of the distortion bound of the chosen variant: `D`, or the
    /// lacunarity constant `K` for the simple variant.
    pub fn log_distortion_bound(&self) -> f64 {
        if self.simple {
            self.log_k
        } else {
            self.d.ln()
        }
    }

    /// Lacunarity constants of the intermediate map, `(2 tau^(-2h) / (1 - 3 tau), 1/tau)`, as logs.
    pub fn intermediate_lacunarity(&self) -> (f64, f64) {
        (2f64.ln() - (1.0 - 3.0 * self.tau).ln() - 2.0 * self.h as f64 * self.tau.ln(), -self.tau.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_mode_hits_the_exponent() {
        let p = PipelineParams::from_epsilon(0.9).unwrap();
        assert_eq!(p.k, 12);
        assert_eq!(p.h, 288);
        assert!((p.s - 0.1).abs() < 1e-9);
        assert!(p.d <= 10.0);
        for &eps in &[0.2, 0.5, 0.7] {
            let p = PipelineParams::from_epsilon(eps).unwrap();
            assert!((p.s - (1.0 - eps)).abs() < 1e-9);
            assert!(p.d <= 9.0 / eps);
        }
    }

    #[test]
    fn delta_mode() {
        let p = PipelineParams::from_delta(0.3).unwrap();
        assert_eq!((p.k, p.h), (2, 8));
        assert!((p.tau - 1.0 / 30.0).abs() < 1e-15);
        assert!(p.d_prime > 2.0 && (p.d_prime - 0.9 / (31.0 / 30.0) * 2.3).abs() < 1e-12);
        let q = PipelineParams::from_delta(0.45).unwrap();
        assert!(q.tau_substituted && (q.tau - 0.045).abs() < 1e-15);
        assert!(matches!(PipelineParams::from_delta(0.6), Err(SkeletonError::DeltaOutOfRange(_))));
        assert!(PipelineParams::raw(2.45, 2, 0.05).is_err());
    }

    #[test]
    fn cover_constant_in_log_domain() {
        let p = PipelineParams::from_delta(0.3).unwrap();
        let k = p.log_k.exp();
        let g = p.gamma_log.exp();
        assert!(((1.0 + 2.0 * k * k * g).ln() - p.cover_const_log).abs() < 1e-9);
        let big = PipelineParams::from_epsilon(0.5).unwrap();
        assert!(big.cover_const_log.is_finite() && big.cover_const_log > 1e3);
    }
}
