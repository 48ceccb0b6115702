//! Large-argument expansion of ₁F₂(a; b₁, b₂; −x²).

use super::gamma::{gamma, rgamma};
use crate::result::{EvalResult, Method};
use num_complex::Complex64;
use std::f64::consts::PI;

const MAX_TERMS: usize = 400;

/// Algebraic plus oscillatory expansion, each truncated before its smallest
/// term; the error estimate is the sum of the first omitted terms.
pub fn hyp1f2_large_negative(a: f64, b1: f64, b2: f64, x: f64) -> Option<EvalResult> {
    expansion(a, b1, b2, x, 0.0)
}

/// Same, with the argument given as −w (w > 0); x = √w is carried as a
/// double-word so the phase 2x keeps full accuracy at large x.
pub(crate) fn hyp1f2_large_negative_sq(a: f64, b1: f64, b2: f64, w: f64) -> Option<EvalResult> {
    let x = w.sqrt();
    let lo = (-x).mul_add(x, w) / (2.0 * x);
    expansion(a, b1, b2, x, lo)
}

fn expansion(a: f64, b1: f64, b2: f64, x: f64, x_lo: f64) -> Option<EvalResult> {
    if !(x > 0.0) || a <= 0.0 {
        return None;
    }
    let gb = gamma(b1).ok()? * gamma(b2).ok()?;
    if !gb.is_finite() {
        return None;
    }
    let u = f64::EPSILON;

    // Algebraic part.
    let a0 = gb * rgamma(b1 - a) * rgamma(b2 - a) * x.powf(-2.0 * a);
    let (alg, alg_err, alg_terms) = if a0 == 0.0 {
        (0.0, 0.0, 0)
    } else {
        let w = -1.0 / (x * x);
        let mut t = 1.0f64;
        let mut s = 0.0f64;
        let mut err = 0.0;
        let mut k = 0usize;
        loop {
            let next = t * (a + k as f64) * (1.0 + a - b1 + k as f64) * (1.0 + a - b2 + k as f64) / (k as f64 + 1.0) * w;
            s += t;
            k += 1;
            if next == 0.0 {
                break;
            }
            if next.abs() >= t.abs() || k >= MAX_TERMS {
                err = next.abs();
                break;
            }
            t = next;
        }
        (a0 * s, (a0 * err).abs() + u * (a0 * s).abs(), k)
    };

    // Oscillatory part: Re[e^{2ix} Σ c_k x^{ν−k}].
    let nu = a - b1 - b2 + 0.5;
    let (be1, be2) = (2.0 * b1 - 2.0, 2.0 * b2 - 2.0);
    let l1 = |s: f64| Complex64::new(0.0, 2.0 * ((s + be1) * (s + be2) + (s + 1.0) * (2.0 * s + 1.0 + be1 + be2)));
    let l0 = |s: f64| s * (s + be1) * (s + be2);
    let c0 = Complex64::from_polar(gb * rgamma(a) / PI.sqrt(), nu * PI / 2.0);
    let mut prev2 = Complex64::new(0.0, 0.0);
    let mut prev1 = c0;
    let inv_x = 1.0 / x;
    let mut sum = c0;
    let mut scale = 1.0f64; // x^{−k}
    let mut last_mag = c0.norm();
    let mut osc_err = 0.0;
    let mut osc_terms = 1;
    for n in 1..MAX_TERMS {
        let nf = n as f64;
        let cn = -(prev1 * l1(nu - nf + 1.0) + prev2 * l0(nu - nf + 2.0)) / (8.0 * nf);
        scale *= inv_x;
        let term = cn * scale;
        let mag = term.norm();
        if mag >= last_mag && n > 1 {
            osc_err = mag;
            break;
        }
        if mag == 0.0 && prev1.norm() == 0.0 {
            break;
        }
        sum += term;
        osc_terms += 1;
        last_mag = mag;
        prev2 = prev1;
        prev1 = cn;
        if mag < 1e-17 * sum.norm() {
            osc_err = mag;
            break;
        }
    }
    let xnu = x.powf(nu);
    let (s0, c0) = (2.0 * x).sin_cos();
    let dp = 2.0 * x_lo;
    let (s2, c2) = (s0 + c0 * dp, c0 - s0 * dp);
    let osc = xnu * (c2 * sum.re - s2 * sum.im);
    let osc_err = xnu * (osc_err + 8.0 * u * sum.norm());
    let value = alg + osc;
    if !value.is_finite() {
        return None;
    }
    let peak = alg.abs() + osc.abs().max(xnu * sum.norm());
    Some(
        EvalResult::new(value, alg_err + osc_err, Method::Asymptotic, alg_terms + osc_terms)
            .with_cancellation(crate::result::ratio_of(peak, value)),
    )
}
