//! Rational versions of the distortion oracles. Every finite float is a
//! dyadic rational, so converting the stored distances loses nothing.

use num::{BigRational, One, Zero};

use super::OracleError;
use crate::metric::{MetricSpace, PointId};
use crate::ultrametric::Ultrametric;

/// Largest space the rational oracles accept.
pub const MAX_EXACT_POINTS: usize = 64;

pub fn to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite distance")
}

fn check_size(n: usize) -> Result<(), OracleError> {
    if n > MAX_EXACT_POINTS {
        Err(OracleError::TooLarge { size: n, limit: MAX_EXACT_POINTS })
    } else {
        Ok(())
    }
}

/// Minimax path distances in exact arithmetic, row-major.
pub fn exact_subdominant(space: &MetricSpace) -> Result<Vec<BigRational>, OracleError> {
    let n = space.len();
    check_size(n)?;
    let mut u: Vec<BigRational> = space.as_flat().iter().map(|&x| to_rational(x)).collect();
    for z in 0..n {
        for x in 0..n {
            for y in 0..n {
                let via = if u[x * n + z] > u[z * n + y] { u[x * n + z].clone() } else { u[z * n + y].clone() };
                if via < u[x * n + y] {
                    u[x * n + y] = via;
                }
            }
        }
    }
    Ok(u)
}

/// `max d / u_d` in exact arithmetic.
pub fn exact_optimal_ultrametric_distortion(space: &MetricSpace) -> Result<BigRational, OracleError> {
    let n = space.len();
    let u = exact_subdominant(space)?;
    let mut best = BigRational::one();
    for x in 0..n {
        for y in (x + 1)..n {
            let r = to_rational(space.d(x, y)) / &u[x * n + y];
            if r > best {
                best = r;
            }
        }
    }
    Ok(best)
}

/// `(max rho/d) (max d/rho)` in exact arithmetic.
pub fn exact_distortion_of_pair(space: &MetricSpace, rho: &Ultrametric) -> Result<BigRational, OracleError> {
    let pts: &[PointId] = rho.points();
    check_size(pts.len())?;
    let (mut expand, mut contract) = (BigRational::zero(), BigRational::zero());
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let r = to_rational(rho.get(i, j));
            if r.is_zero() {
                return Err(OracleError::DegenerateRho(pts[i], pts[j]));
            }
            let d = to_rational(space.d(pts[i], pts[j]));
            let e = &r / &d;
            let c = &d / &r;
            if e > expand {
                expand = e;
            }
            if c > contract {
                contract = c;
            }
        }
    }
    if pts.len() < 2 {
        return Ok(BigRational::one());
    }
    Ok(expand * contract)
}
