use super::RamseyError;

/// `(1 - t) t^(t / (1 - t))`, strictly decreasing from 1 to 0 on `(0, 1)`.
pub fn theta_profile(t: f64) -> f64 {
    (1.0 - t) * (t / (1.0 - t) * t.ln()).exp()
}

/// The exponent reached at distortion `D`: the solution of
/// `(1 - t) t^(t / (1 - t)) = 2 / D`. Bisection stops once the bracket is
/// below `1e-15` and returns its lower end, so the result never overshoots
/// and the distortion it implies stays at most `D`.
pub fn theta_of_distortion(d: f64) -> Result<f64, RamseyError> {
    if !(d.is_finite() && d > 2.0) {
        return Err(RamseyError::DomainError(format!("distortion {d} must exceed 2")));
    }
    let target = 2.0 / d;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if theta_profile(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(lo)
}

/// Inverse of [`theta_of_distortion`]: `2 / ((1 - s) s^(s / (1 - s)))`.
pub fn theta_inverse(s: f64) -> f64 {
    2.0 / theta_profile(s)
}

/// The distortion attached to a two-weight run at parameter `eps`:
/// `2 / (eps (1 - eps)^((1 - eps) / eps))`.
pub fn distortion_for_epsilon(eps: f64) -> f64 {
    2.0 / (eps * ((1.0 - eps) / eps * (1.0 - eps).ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_at_eight_is_one_half() {
        let t = theta_of_distortion(8.0).unwrap();
        assert!((t - 0.5).abs() <= 1e-9);
        assert!(theta_profile(t) >= 0.25);
    }

    #[test]
    fn domain_error_at_two() {
        assert!(matches!(theta_of_distortion(2.0), Err(RamseyError::DomainError(_))));
        assert!(matches!(theta_of_distortion(1.0), Err(RamseyError::DomainError(_))));
    }

    #[test]
    fn inverse_and_epsilon_distortion_agree() {
        for &s in &[0.1, 0.3, 0.5, 0.9] {
            let d = theta_inverse(s);
            assert!((theta_of_distortion(d).unwrap() - s).abs() < 1e-9);
            let e = 1.0 - s;
            assert!((distortion_for_epsilon(e) - d).abs() <= 1e-9 * d);
        }
    }
}
