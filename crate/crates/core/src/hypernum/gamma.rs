//! Gamma function and its logarithm.

use crate::error::{Error, Result};

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// ln|Γ(x)| and the sign of Γ(x).
pub fn log_gamma(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("log_gamma({x})")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    let (lg, sign) = libm::lgamma_r(x);
    Ok((lg, if sign < 0 { -1.0 } else { 1.0 }))
}

/// Γ(x); overflows to ±∞ beyond x ≈ 171.6.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma({x})")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    Ok(libm::tgamma(x))
}

/// 1/Γ(x), zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x < 170.0 {
        let g = libm::tgamma(x);
        if g.is_finite() {
            return 1.0 / g;
        }
    }
    let (lg, sign) = libm::lgamma_r(x);
    let s = if sign < 0 { -1.0 } else { 1.0 };
    s * (-lg).exp()
}

/// Γ(a)/Γ(b) without intermediate overflow when both are large.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    if a.abs() < 160.0 && b.abs() < 160.0 {
        return Ok(gamma(a)? * rgamma(b));
    }
    let (la, sa) = log_gamma(a)?;
    if is_nonpositive_integer(b) {
        return Ok(0.0);
    }
    let (lb, sb) = log_gamma(b)?;
    Ok(sa * sb * (la - lb).exp())
}
