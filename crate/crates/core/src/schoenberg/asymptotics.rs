//! Large-m behaviour of ψ̂(m) and of the terminating ₃F₂ behind it.

use crate::error::{Error, Result};
use crate::hypernum::{log_gamma, rgamma};
use crate::wendland::WendlandParams;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticOrder {
    LeadingOnly,
    WithOscillatory,
}

/// (2π)^{(d−1)/2} 2^{λ−1/2} Γ(λ−1/2) μ ε^{2α+1} / (√(2π) (m+(d−1)/2)^{2λ−1}).
pub fn coeff_asymptotic(m: usize, params: &WendlandParams) -> f64 {
    let d = params.d() as f64;
    let lam = params.lambda();
    let l = 0.5 * (d - 1.0) * (2.0 * PI).ln() + (lam - 0.5) * 2f64.ln() + log_gamma(lam - 0.5).unwrap().0
        + (2.0 * params.alpha() + 1.0) * params.epsilon().ln()
        - 0.5 * (2.0 * PI).ln()
        - (2.0 * lam - 1.0) * (m as f64 + (d - 1.0) / 2.0).ln();
    params.mu() * l.exp()
}

/// 𝒦^{(d')} = 2^{(d'+1)/2+α} Γ((d'+1)/2+α) μ ε^{2α+1} / √(2π), the constant
/// of the Euclidean decay z^{−(d'+1+2α)} in dimension d'.
pub fn k_constant(d_prime: usize, params: &WendlandParams) -> f64 {
    let h = (d_prime as f64 + 1.0) / 2.0 + params.alpha();
    let l = h * 2f64.ln() + log_gamma(h).unwrap().0 + (2.0 * params.alpha() + 1.0) * params.epsilon().ln()
        - 0.5 * (2.0 * PI).ln();
    params.mu() * l.exp()
}

struct Shape {
    n: f64,
    a: f64,
    b1: f64,
    b2: f64,
    z: f64,
    lam: f64,
    mu: f64,
}

fn shape(m: usize, params: &WendlandParams) -> Result<Shape> {
    params.require_sphere()?;
    if params.d() % 2 == 0 {
        return Err(Error::EvenDimensionUnsupported);
    }
    let (lam, mu, eps) = (params.lambda(), params.mu(), params.epsilon());
    Ok(Shape {
        n: m as f64 + (params.d() as f64 - 3.0) / 2.0,
        a: lam - 0.5,
        b1: lam + (mu - 1.0) / 2.0,
        b2: lam + mu / 2.0,
        z: 1.0 / (4.0 * eps * eps),
        lam,
        mu,
    })
}

/// Γ(x+k)/Γ(x) for real k, including the cases where x is a pole.
fn gamma_shift_ratio(x: f64, k: f64) -> Result<f64> {
    let x_pole = x <= 0.0 && x == x.round();
    if x_pole {
        // k is an integer whenever this arises
        let k = k.round() as i64;
        if k >= 0 {
            return Ok((0..k).map(|j| x + j as f64).product());
        }
        return Ok(1.0 / (1..=-k).map(|j| x - j as f64).product::<f64>());
    }
    let (lt, st) = log_gamma(x + k)?;
    Ok(st * (lt.exp() * rgamma(x)))
}

/// (leading, oscillatory) parts of the large-n form of
/// ₃F₂(−n, n+1, a; b₁, b₂; z), n = m+(d−3)/2, for odd d.
pub fn asymptotic_3f2_terms(m: usize, params: &WendlandParams) -> Result<(f64, f64)> {
    let s = shape(m, params)?;
    let np1 = s.n + 1.0;
    let lg = |x: f64| log_gamma(x).map(|v| v.0);
    let g12 = lg(s.b1)? + lg(s.b2)?;
    let lead = (g12 - lg(s.b1 - s.a)? - lg(s.b2 - s.a)? - s.a * s.z.ln() - 2.0 * s.a * np1.ln()).exp();
    let q = s.lam + s.mu;
    let osc = if s.z < 1.0 {
        let ap = -(q - 0.5) / 2.0;
        let theta = 2.0 * s.z.sqrt().asin();
        let amp = (g12 + 2.0 * ap * np1.ln() - 0.5 * PI.ln() - lg(s.a)? + ap * s.z.ln()
            - (ap + 0.5) * (1.0 - s.z).ln())
        .exp();
        amp * ((s.n + 0.5) * theta + PI * ap).cos()
    } else {
        let sign = if (s.n.round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
        let ratio = gamma_shift_ratio(2.0 - q, s.n + 1.0 - q)?;
        let rest = (g12 - lg(s.a)? - lg(s.n + 1.0)?).exp();
        sign * ratio * rest * (1.0 - 2.0 * (1.0 - q).powi(2) / np1)
    };
    Ok((lead, osc))
}

/// Large-m approximation of the ₃F₂ in ψ̂(m) (odd d only).
pub fn asymptotic_3f2(m: usize, params: &WendlandParams, order: AsymptoticOrder) -> Result<f64> {
    let (lead, osc) = asymptotic_3f2_terms(m, params)?;
    Ok(match order {
        AsymptoticOrder::LeadingOnly => lead,
        AsymptoticOrder::WithOscillatory => lead + osc,
    })
}
