//! Bessel function of the first kind, J_ν(x), for real ν ≥ 0 and x ≥ 0.

use super::dd::DoubleWord;
use super::gamma::rgamma;
use std::f64::consts::PI;

const SERIES_LIMIT: f64 = 20.0;

/// J_ν(x).
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    assert!(nu >= 0.0 && x >= 0.0, "bessel_j needs ν ≥ 0, x ≥ 0");
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        return power_prefactor(nu, x) * series_sum(nu, x).to_f64();
    }
    large_argument(nu, x)
}

/// x^{-ν} J_ν(x), regular at the origin where it equals 1/(2^ν Γ(ν+1)).
pub fn bessel_j_scaled(nu: f64, x: f64) -> f64 {
    assert!(nu >= 0.0 && x >= 0.0);
    if x <= SERIES_LIMIT {
        let norm = if nu + 1.0 < 170.0 {
            2f64.powf(-nu) * rgamma(nu + 1.0)
        } else {
            (-nu * 2f64.ln() - libm::lgamma(nu + 1.0)).exp()
        };
        return norm * series_sum(nu, x).to_f64();
    }
    large_argument(nu, x) * x.powf(-nu)
}

/// (x/2)^ν / Γ(ν+1)
fn power_prefactor(nu: f64, x: f64) -> f64 {
    if nu + 1.0 < 170.0 {
        let p = (0.5 * x).powf(nu) * rgamma(nu + 1.0);
        if p.is_finite() && p != 0.0 {
            return p;
        }
    }
    (nu * (0.5 * x).ln() - libm::lgamma(nu + 1.0)).exp()
}

/// Σ_k (−x²/4)^k / (k! (ν+1)_k) in double-word arithmetic.
fn series_sum(nu: f64, x: f64) -> DoubleWord {
    let q = -(DoubleWord::new(x) * DoubleWord::new(x)).mul_f64(0.25);
    let mut term = DoubleWord::ONE;
    let mut sum = DoubleWord::ONE;
    let mut k = 0.0f64;
    loop {
        k += 1.0;
        term = term * q / DoubleWord::new(k).mul_f64(nu + k);
        sum += term;
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) || k > 500.0 {
            break;
        }
    }
    sum
}

/// Hankel expansion for J_ν(x) with small ν and large x.
fn hankel(nu: f64, x: f64) -> f64 {
    let mu4 = 4.0 * nu * nu;
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        term *= (mu4 - (2.0 * kf - 1.0).powi(2)) * inv8x / kf;
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let phase = (0.5 * nu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

fn large_argument(nu: f64, x: f64) -> f64 {
    let base = nu.floor();
    let nu0 = nu - base;
    let steps = base as usize;
    let j0 = hankel(nu0, x);
    if steps == 0 {
        return j0;
    }
    let j1 = hankel(nu0 + 1.0, x);
    // Forward recurrence is stable while the order stays below x.
    let forward_to = |target: usize| -> (f64, f64) {
        let (mut prev, mut cur) = (j0, j1);
        for k in 1..target {
            let next = 2.0 * (nu0 + k as f64) / x * cur - prev;
            prev = cur;
            cur = next;
        }
        (prev, cur)
    };
    if nu <= x {
        return forward_to(steps).1;
    }
    // Miller: recur downward from far above ν, normalise at an order below x.
    let anchor = (x - nu0).floor().max(1.0) as usize;
    let j_anchor = forward_to(anchor).1;
    let top = steps + 60 + (4.0 * nu.sqrt()).ceil() as usize;
    let mut above = 0.0f64;
    let mut cur = 1e-300f64;
    let mut at_target = 0.0;
    let mut k = top;
    while k > anchor {
        let below = 2.0 * (nu0 + k as f64) / x * cur - above;
        above = cur;
        cur = below;
        k -= 1;
        if k == steps {
            at_target = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            above *= 1e-250;
            at_target *= 1e-250;
        }
    }
    if steps == anchor {
        return j_anchor;
    }
    at_target * j_anchor / cur
}
