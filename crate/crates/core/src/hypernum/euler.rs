//! Euler-integral representations evaluated by Gauss–Jacobi quadrature.
//!
//! ₁F₂(a; b₁, b₂; −x²) = ∫₀¹ w(t) ₀F₁(; b₁; −x² t) dt and
//! ₃F₂(−ν, ν+1, a; c, b; z) = ∫₀¹ w(t) ₂F₁(−ν, ν+1; c; z t) dt,
//! with w(t) ∝ t^{a−1}(1−t)^{b−a−1} of unit mass. The inner ₂F₁ obeys a
//! three-term recurrence in ν, so one pass over the nodes yields every
//! order up to ν at once.

use super::bessel::bessel_j_scaled;
use super::gamma::gamma;
use super::pfq::HyperSeries;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi, integrate, GaussRule, QuadratureConfig};
use crate::result::{ratio_of, EvalResult, Method};
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

const U: f64 = f64::EPSILON * 0.5;

thread_local! {
    static RULES: RefCell<HashMap<(usize, u64, u64), Rc<GaussRule>>> = RefCell::new(HashMap::new());
}

/// Per-thread memo of Gauss–Jacobi rules; rebuilding them dominates cost.
fn rule(n: usize, p: f64, q: f64) -> Result<Rc<GaussRule>> {
    let key = (n, p.to_bits(), q.to_bits());
    if let Some(r) = RULES.with(|m| m.borrow().get(&key).cloned()) {
        return Ok(r);
    }
    let r = Rc::new(gauss_jacobi(n, p, q)?);
    RULES.with(|m| {
        let mut m = m.borrow_mut();
        if m.len() > 256 {
            m.clear();
        }
        m.insert(key, r.clone());
    });
    Ok(r)
}

/// Picks the denominator that goes into the weight: it must exceed `a`, and
/// the larger gap b − a gives the smoother weight.
fn split_denominators(a: f64, b1: f64, b2: f64, other_ok: impl Fn(f64) -> bool) -> Option<(f64, f64)> {
    [(b2, b1), (b1, b2)]
        .into_iter()
        .filter(|&(kb, c)| kb > a && other_ok(c))
        .max_by(|x, y| (x.0 - a).total_cmp(&(y.0 - a)))
}

/// ₁F₂(a; b₁, b₂; −x²) through the Bessel kernel.
pub fn hyp1f2_bessel(a: f64, b1: f64, b2: f64, x: f64) -> Result<Option<EvalResult>> {
    if !(a > 0.0) {
        return Ok(None);
    }
    let Some((kb, c)) = split_denominators(a, b1, b2, |c| c >= 1.0) else {
        return Ok(None);
    };
    let norm = gamma(c)? * 2f64.powf(c - 1.0);
    let kernel = |t: f64| norm * bessel_j_scaled(c - 1.0, 2.0 * x * t.sqrt());
    let n1 = x.ceil() as usize + 40;
    let n2 = n1 + n1 / 4 + 8;
    let (p, q) = (a - 1.0, kb - a - 1.0);
    let quad = |n: usize| -> Result<(f64, f64)> {
        let r = rule(n, p, q)?;
        let mut s = 0.0;
        let mut sa = 0.0;
        for (t, w) in r.nodes.iter().zip(&r.weights) {
            let k = kernel(*t);
            s += w * k;
            sa += w * k.abs();
        }
        Ok((s, sa))
    };
    let (v1, _) = quad(n1)?;
    let (v2, abs2) = quad(n2)?;
    let err = (v2 - v1).abs() + 16.0 * U * abs2;
    Ok(Some(EvalResult::new(v2, err, Method::Quadrature, n2).with_cancellation(ratio_of(abs2, v2))))
}

/// ₂F₁(A, B; C; x) for 0 ≤ x ≤ 1 and small |A|, |B|: power series for
/// x ≤ 0.8, otherwise the Euler integral with B as the weight exponent.
fn hyp2f1_small(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    if x <= 0.8 {
        let mut t = 1.0f64;
        let mut s = 1.0f64;
        for j in 0..2000 {
            let jf = j as f64;
            t *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0)) * x;
            s += t;
            if t.abs() < 1e-18 * s.abs() {
                break;
            }
        }
        return Ok(s);
    }
    if !(c > b && b > 0.0) {
        return Err(Error::InvalidParameter("Euler integral needs C > B > 0".into()));
    }
    let beta = gamma(b)? * gamma(c - b)? / gamma(c)?;
    let cfg = QuadratureConfig::with_tolerances(1e-15, 1e-300);
    let r = integrate(
        |s: f64| s.powf(b - 1.0) * (1.0 - s).powf(c - b - 1.0) * (1.0 - x * s).powf(-a),
        0.0,
        1.0,
        &cfg,
    )?;
    Ok(r.value / beta)
}

/// ₃F₂(−ν, ν+1, a; c, b; z) for every order ν = ν₀ − 1 + k, k = 0..=K, where
/// ν₀ = frac(ν_max) and ν₀ − 1 + K = ν_max. Here b is the weight denominator.
pub fn legendre_3f2_ladder(nu_max: f64, a: f64, b: f64, c: f64, z: f64) -> Result<Vec<EvalResult>> {
    if !(a > 0.0 && b > a && z > 0.0 && z <= 1.0 && nu_max >= -1.0) {
        return Err(Error::InvalidParameter("ladder needs b > a > 0 and 0 < z ≤ 1".into()));
    }
    let mut nu0 = nu_max - nu_max.floor();
    if nu0 < 1e-12 || nu0 > 1.0 - 1e-12 {
        nu0 = 0.0;
    }
    let steps = (nu_max - (nu0 - 1.0)).round() as usize;
    let integer = nu0 == 0.0;
    let (n1, n2) = if integer {
        let n = ((nu_max + 1.0) / 2.0).ceil() as usize + 4;
        (n, n + 6)
    } else {
        let n = nu_max.ceil() as usize + 60;
        (n, (1.3 * n as f64).ceil() as usize + 10)
    };
    let (p, q) = (a - 1.0, b - a - 1.0);
    let run = |n: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let r = rule(n, p, q)?;
        let mut sums = vec![0.0; steps + 1];
        let mut abs = vec![0.0; steps + 1];
        for (t, w) in r.nodes.iter().zip(&r.weights) {
            let x = z * t;
            let (mut f0, mut f1) = if integer {
                (1.0, 1.0)
            } else {
                (hyp2f1_small(1.0 - nu0, nu0, c, x)?, hyp2f1_small(-nu0, nu0 + 1.0, c, x)?)
            };
            sums[0] += w * f0;
            abs[0] += w * f0.abs();
            if steps >= 1 {
                sums[1] += w * f1;
                abs[1] += w * f1.abs();
            }
            let y = 1.0 - 2.0 * x;
            for k in 2..=steps {
                let nn = nu0 - 1.0 + k as f64;
                let f2 = ((2.0 * nn - 1.0) * y * f1 - (nn - c) * f0) / (c + nn - 1.0);
                sums[k] += w * f2;
                abs[k] += w * f2.abs();
                f0 = f1;
                f1 = f2;
            }
        }
        Ok((sums, abs))
    };
    let (v1, _) = run(n1)?;
    let (v2, a2) = run(n2)?;
    Ok((0..=steps)
        .map(|k| {
            let err = (v2[k] - v1[k]).abs() + 16.0 * U * a2[k] * ((k + 1) as f64).sqrt();
            EvalResult::new(v2[k], err, Method::Quadrature, n2).with_cancellation(ratio_of(a2[k], v2[k]))
        })
        .collect())
}

/// Recognises ₃F₂(−ν, ν+1, a; b₁, b₂; z) with 0 < z ≤ 1 and returns
/// (ν, a, weight denominator, other denominator).
pub(crate) fn legendre_shape(series: &HyperSeries) -> Option<(f64, f64, f64, f64)> {
    let (num, den, z) = (series.numerators(), series.denominators(), series.argument());
    if num.len() != 3 || den.len() != 2 || !(z > 0.0 && z <= 1.0) {
        return None;
    }
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        if (num[i] + num[j] - 1.0).abs() <= 1e-12 && num[k] > 0.0 {
            let nu = -num[i].min(num[j]);
            let a = num[k];
            let (b, c) = split_denominators(a, den[0], den[1], |c| c > 0.0)?;
            return Some((nu, a, b, c));
        }
    }
    None
}

pub fn hyp3f2_legendre(series: &HyperSeries) -> Result<Option<EvalResult>> {
    let Some((nu, a, b, c)) = legendre_shape(series) else {
        return Ok(None);
    };
    let ladder = match legendre_3f2_ladder(nu, a, b, c, series.argument()) {
        Ok(l) => l,
        Err(Error::InvalidParameter(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(ladder.last().copied())
}
