//! Independent routes to ψ̂(m): Gegenbauer projection of the restricted
//! kernel, the Bessel-square integral of φ̂, and the finite-integral series.

use super::{sphere_area, CapGeometry};
use crate::error::{Error, Result};
use crate::fourier::{ft_closed, FourierConstants};
use crate::hypernum::{
    bessel_j, eval_pfq, gegenbauer_normalized, log_gamma, DoubleWord, HyperSeries, SummationPolicy,
};
use crate::quadrature::{integrate_oscillatory_to, integrate_with_breaks, integrate_with_noise, QuadratureConfig};
use crate::result::{ratio_of, EvalResult, Method};
use crate::wendland::{WendlandFunction, WendlandParams};
use std::cell::Cell;
use std::f64::consts::PI;

/// Largest degree of the polynomial subtracted from ψ before projecting.
const SUBTRACT_DEGREE: usize = 96;

/// Chebyshev coefficients of the degree-k interpolant of f on [−1, 1].
fn chebyshev_fit<F: Fn(f64) -> Result<f64>>(f: F, k: usize) -> Result<Vec<f64>> {
    let n = k + 1;
    let vals: Vec<f64> = (0..n)
        .map(|j| f((PI * (j as f64 + 0.5) / n as f64).cos()))
        .collect::<Result<_>>()?;
    Ok((0..n)
        .map(|i| {
            let s: f64 = vals
                .iter()
                .enumerate()
                .map(|(j, v)| v * (PI * i as f64 * (j as f64 + 0.5) / n as f64).cos())
                .sum();
            if i == 0 {
                s / n as f64
            } else {
                2.0 * s / n as f64
            }
        })
        .collect())
}

fn clenshaw_dd(c: &[f64], t: DoubleWord) -> DoubleWord {
    let (mut b1, mut b2) = (DoubleWord::ZERO, DoubleWord::ZERO);
    let two_t = t.mul_f64(2.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = (two_t * b1 - b2).add_f64(ck);
        b2 = b1;
        b1 = b0;
    }
    (t * b1 - b2).add_f64(c.first().copied().unwrap_or(0.0))
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c.first().copied().unwrap_or(0.0)
}

/// ω_{d−2} ∫₀^π ψ(cos θ) P_m(cos θ) sin^{d−2}θ dθ with ψ(t) = φ(√(2−2t)) and
/// P_m the Gegenbauer polynomial normalised to P_m(1) = 1 (cos mθ for d = 2).
///
/// A Chebyshev interpolant of ψ of degree below m is subtracted first; it is
/// orthogonal to P_m, and the remainder is small, so rounding in P_m no
/// longer meets the full size of ψ. For odd d the integral runs over the
/// chordal distance r with ψ − g formed in double-word arithmetic.
pub fn coeff_oracle_projection(m: usize, params: &WendlandParams, cfg: &QuadratureConfig) -> Result<EvalResult> {
    let cap = CapGeometry::new(params)?;
    let d = params.d();
    let phi = WendlandFunction::new(params);
    let lam = (d as f64 - 2.0) / 2.0;
    let psi = |t: f64| phi.value((2.0 - 2.0 * t).max(0.0).sqrt());
    let smooth = if m == 0 { Vec::new() } else { chebyshev_fit(psi, (m - 1).min(SUBTRACT_DEGREE))? };
    // rounding in the Clenshaw sum scales with Σ|c_k|, not with |ψ(t)|
    let g_scale: f64 = smooth.iter().map(|c| c.abs()).sum();
    let failure = Cell::new(None);
    let ts = cap.theta_support;
    let end = if smooth.is_empty() { ts } else { PI };
    let pieces = ((end * (m as f64 + 1.0) / PI).ceil() as usize + 1).max(2);
    let mut breaks: Vec<f64> = (0..=pieces).map(|k| end * k as f64 / pieces as f64).collect();
    if ts < end && !breaks.contains(&ts) {
        breaks.push(ts);
        breaks.sort_by(f64::total_cmp);
    }
    let cfg = QuadratureConfig { max_subdivisions: cfg.max_subdivisions.max(16 * pieces), ..*cfg };
    let out = if d % 2 == 1 {
        // in r = 2 sin(θ/2) the nodes are exact, t = 1 − r²/2 and s = εr are
        // carried as double-words and ψ − g is formed before rounding
        let half_power = (d as i32 - 3) / 2;
        let eps = params.epsilon();
        let f = |r: f64| {
            let t = DoubleWord::ONE - DoubleWord::prod(r, r).mul_f64(0.5);
            let raw = match phi.value_s_dd(DoubleWord::prod(eps, r)) {
                Ok(v) => v,
                Err(e) => {
                    failure.set(Some(e));
                    return (0.0, 0.0);
                }
            };
            let v = (raw - clenshaw_dd(&smooth, t)).to_f64();
            let basis = gegenbauer_normalized(m, lam, t.to_f64());
            let w = basis * r * (r * r * (1.0 - 0.25 * r * r)).powi(half_power);
            (v * w, (v.abs() + 1e-15 * (raw.hi.abs() + g_scale)) * w.abs())
        };
        let rb: Vec<f64> = breaks
            .iter()
            .map(|&th| match th {
                th if th == PI => 2.0,
                th if th == ts => 1.0 / eps,
                th => 2.0 * (0.5 * th).sin(),
            })
            .collect();
        integrate_with_noise(f, &rb, &cfg)?
    } else {
        let mf = m as f64;
        let f = |th: f64| {
            let t = th.cos();
            let raw = match psi(t) {
                Ok(v) => v,
                Err(e) => {
                    failure.set(Some(e));
                    return (0.0, 0.0);
                }
            };
            let v = raw - clenshaw(&smooth, t);
            let basis = if d == 2 {
                // cos(mθ) with mθ carried to double-word accuracy
                let hi = mf * th;
                let lo = mf.mul_add(th, -hi);
                let (s, c) = hi.sin_cos();
                c - s * lo
            } else {
                gegenbauer_normalized(m, lam, t)
            };
            let w = basis * th.sin().powi(d as i32 - 2);
            (v * w, (raw.abs() + v.abs() + g_scale) * w.abs())
        };
        integrate_with_noise(f, &breaks, &cfg)?
    };
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let mut out = out.scaled(sphere_area(d - 2));
    out.flags.outside_positivity = !params.pd_euclidean();
    Ok(out)
}

/// Integration horizon R = max(200, 50(m+d)) of the Bessel-square route.
pub fn linkup_horizon(m: usize, d: usize) -> f64 {
    (50.0 * (m + d) as f64).max(200.0)
}

/// (2π)^{d/2} ∫_R^∞ z J_γ²(z) φ̂(z) dz from the large-z forms of J_γ and φ̂,
/// returned as (value, error bound).
pub fn linkup_tail(m: usize, params: &WendlandParams, horizon: f64) -> (f64, f64) {
    let d = params.d() as f64;
    let (lam, mu, eps) = (params.lambda(), params.mu(), params.epsilon());
    let gam = m as f64 + (d - 2.0) / 2.0;
    let r = horizon;
    // φ̂ ≈ K z^{−2λ} + K_o z^{−q} cos(z/ε − πq/2),  J_γ² ≈ (1 + sin(2z − γπ))/(πz)
    let k = crate::fourier::ft_asymptotic(1.0, params, false);
    let q = lam + mu;
    let (b1, b2) = (lam + mu / 2.0, lam + (mu + 1.0) / 2.0);
    let k_osc = FourierConstants::new(params).prefactor
        * (log_gamma(b1).unwrap().0 + log_gamma(b2).unwrap().0 - 0.5 * PI.ln() - log_gamma(lam).unwrap().0
            + q * (2.0 * eps).ln())
        .exp();
    let p = 2.0 * lam;
    let mut t = k * r.powf(1.0 - p) / (p - 1.0);
    t += k * r.powf(-p) * (2.0 * r - gam * PI).cos() / 2.0;
    t += -k_osc * r.powf(-q) * eps * (r / eps - PI * q / 2.0).sin();
    let fast = 2.0 + 1.0 / eps;
    t += 0.5 * k_osc * r.powf(-q) * (fast * r - gam * PI - PI * q / 2.0).cos() / fast;
    let beat = 2.0 - 1.0 / eps;
    if beat.abs() * r < 1e-9 {
        t += 0.5 * k_osc * (PI * q / 2.0 - gam * PI).sin() * r.powf(1.0 - q) / (q - 1.0);
    } else {
        t += 0.5 * k_osc * r.powf(-q) * (beat * r - gam * PI + PI * q / 2.0).cos() / beat;
    }
    let scale = (2.0 * PI).powf(d / 2.0) / PI;
    let value = scale * t;
    let lead = scale * (k * r.powf(1.0 - p) / (p - 1.0) + k_osc * r.powf(1.0 - q) / (q - 1.0).max(1e-300));
    let err = lead.abs() * ((p + q) / r + (gam * gam + 1.0) / (r * r));
    (value, err)
}

/// (2π)^{d/2} ∫₀^∞ z J²_{m+(d−2)/2}(z) φ̂(z) dz: quadrature to the horizon
/// plus the analytic tail.
pub fn coeff_oracle_linkup(m: usize, params: &WendlandParams, cfg: &QuadratureConfig) -> Result<EvalResult> {
    if params.d() < 2 {
        return Err(Error::Domain("the Bessel-square route needs d ≥ 2".into()));
    }
    let d = params.d() as f64;
    let gam = m as f64 + (d - 2.0) / 2.0;
    let horizon = linkup_horizon(m, params.d());
    let failure = Cell::new(None);
    let f = |z: f64| {
        if z == 0.0 {
            return 0.0;
        }
        match ft_closed(z, params) {
            Ok(v) => z * bessel_j(gam, z).powi(2) * v.value,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let spacing = 0.5 * PI * params.epsilon().min(1.0);
    let body = integrate_oscillatory_to(f, 0.0, spacing, horizon, cfg)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let scale = (2.0 * PI).powf(d / 2.0);
    let (tail, tail_err) = linkup_tail(m, params, horizon);
    let mut out = EvalResult::new(
        scale * body.value + tail,
        scale * body.abs_error_estimate + tail_err,
        Method::Quadrature,
        body.terms_or_nodes,
    );
    out.flags = body.flags;
    out.flags.tail_corrected = true;
    out.flags.outside_positivity = !params.pd_euclidean();
    Ok(out)
}

/// (2π)^{d/2} ∫₀^r z J_γ²(z) φ̂(z) dz as a double series: the Taylor series
/// of φ̂ integrated against J_γ² term by term, each term a ₂F₃ in −r².
pub fn finite_integral_series(gam: f64, r: f64, params: &WendlandParams, max_terms: usize) -> Result<EvalResult> {
    if !(gam > 0.0) || !(r > 0.0) {
        return Err(Error::InvalidParameter("need γ > 0 and r > 0".into()));
    }
    if r > 10.0 {
        return Err(Error::PrecisionExhausted { ratio: f64::INFINITY });
    }
    let d = params.d() as f64;
    let (lam, mu, eps) = (params.lambda(), params.mu(), params.epsilon());
    let (b1, b2) = (lam + mu / 2.0, lam + (mu + 1.0) / 2.0);
    let c = FourierConstants::new(params).c_lambda_mu;
    let log_pre = 0.5 * d * (2.0 * PI).ln() + c.ln() - 0.5 * (2.0 * PI).ln() - d * eps.ln()
        - 2.0 * (gam * 2f64.ln() + log_gamma(gam + 1.0)?.0)
        + 2.0 * (gam + 1.0) * r.ln()
        - (2.0 * (gam + 1.0)).ln();
    let pre = log_pre.exp();
    let x = -r * r / (4.0 * eps * eps);
    let pol = SummationPolicy::default();
    let mut sum = DoubleWord::new(0.0);
    let mut coef = 1.0f64;
    let mut peak = 0.0f64;
    let mut inner_err = 0.0f64;
    let mut small = 0;
    let mut used = 0;
    for l in 0..max_terms {
        let lf = l as f64;
        if l > 0 {
            coef *= (gam + lf) * (lam + lf - 1.0) * x / ((gam + 1.0 + lf) * (b1 + lf - 1.0) * (b2 + lf - 1.0) * lf);
        }
        let inner = eval_pfq(
            &HyperSeries::new(&[gam + 1.0 + lf, gam + 0.5], &[gam + 2.0 + lf, gam + 1.0, 2.0 * gam + 1.0], -r * r)?,
            &pol,
        )?;
        let term = coef * inner.value;
        sum += DoubleWord::new(term);
        used = l + 1;
        let s = sum.to_f64();
        peak = peak.max(s.abs()).max(term.abs());
        inner_err += (coef * inner.abs_error_estimate).abs();
        if term.abs() <= 1e-17 * s.abs() && lf > x.abs() {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
        if used == max_terms {
            return Err(Error::Divergent(format!("outer series not converged in {max_terms} terms")));
        }
    }
    let s = sum.to_f64();
    let ratio = ratio_of(peak, s);
    if ratio > 1e10 {
        return Err(Error::PrecisionExhausted { ratio });
    }
    let err = inner_err + 4.0 * f64::EPSILON * peak * (used as f64).sqrt();
    Ok(EvalResult::new(pre * s, pre * err, Method::PlainSum, used).with_cancellation(ratio))
}

/// The same finite integral by adaptive quadrature of z J_γ² φ̂.
pub fn finite_integral_quadrature(gam: f64, r: f64, params: &WendlandParams, cfg: &QuadratureConfig) -> Result<EvalResult> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("need r > 0".into()));
    }
    let failure = Cell::new(None);
    let f = |z: f64| match ft_closed(z, params) {
        Ok(v) => z * bessel_j(gam, z).powi(2) * v.value,
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let pieces = ((r / PI).ceil() as usize).max(1) * 2;
    let breaks: Vec<f64> = (0..=pieces).map(|k| r * k as f64 / pieces as f64).collect();
    let out = integrate_with_breaks(f, &breaks, cfg)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(out.scaled((2.0 * PI).powf(params.d() as f64 / 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schoenberg::coeff_closed;

    fn p(mu: f64, alpha: f64, eps: f64, d: usize) -> WendlandParams {
        WendlandParams::new(mu, alpha, eps, d).unwrap()
    }

    fn tight() -> QuadratureConfig {
        QuadratureConfig::with_tolerances(1e-11, 1e-300)
    }

    #[test]
    fn projection_pins_degree_zero() {
        let w = p(4.0, 1.0, 1.0, 3);
        let a = coeff_closed(0, &w).unwrap().value;
        let b = coeff_oracle_projection(0, &w, &tight()).unwrap().value;
        assert!(((a - b) / a).abs() < 1e-10);
    }

    #[test]
    fn linkup_matches_closed() {
        for (w, m) in [(p(4.0, 1.0, 1.0, 3), 0), (p(5.0, 1.0, 2.0, 5), 2)] {
            let a = coeff_closed(m, &w).unwrap().value;
            let b = coeff_oracle_linkup(m, &w, &tight()).unwrap();
            assert!(((a - b.value) / a).abs() < 1e-6, "{w:?} m={m}: {a} vs {}", b.value);
            assert!(b.flags.tail_corrected);
        }
    }

    #[test]
    fn tail_is_a_power_law() {
        let w = p(4.0, 1.0, 1.0, 3);
        let lam = w.lambda();
        let k = crate::fourier::ft_asymptotic(1.0, &w, false);
        let lead = |r: f64| crate::quadrature::power_tail_bound(r, k, 2.0 * lam);
        let ratio = lead(200.0) / lead(400.0);
        assert!((ratio - 4f64.powf(lam - 0.5)).abs() < 1e-9 * ratio);
        let (t1, _) = linkup_tail(0, &w, 200.0);
        let (t2, _) = linkup_tail(0, &w, 400.0);
        assert!(t1 > t2 && t2 > 0.0);
    }

    #[test]
    fn finite_integral_routes_agree() {
        let cfg = tight();
        let w = p(4.0, 1.0, 1.0, 3);
        let a = finite_integral_series(1.5, 2.0, &w, 500).unwrap().value;
        let b = finite_integral_quadrature(1.5, 2.0, &w, &cfg).unwrap().value;
        assert!(((a - b) / a).abs() < 1e-8, "{a} {b}");
        let w2 = p(3.0, 1.0, 1.0, 2);
        let a = finite_integral_series(0.5, 5.0, &w2, 500).unwrap().value;
        let b = finite_integral_quadrature(0.5, 5.0, &w2, &cfg).unwrap().value;
        assert!(((a - b) / a).abs() < 1e-7, "{a} {b}");
    }

    #[test]
    fn finite_integral_small_r_power() {
        let w = p(4.0, 1.0, 1.0, 3);
        let g = 1.5;
        let a = finite_integral_series(g, 1e-3, &w, 100).unwrap().value;
        let b = finite_integral_series(g, 2e-3, &w, 100).unwrap().value;
        assert!((b / a / 2f64.powf(2.0 * (g + 1.0)) - 1.0).abs() < 1e-5);
        assert!(finite_integral_series(g, 11.0, &w, 100).is_err());
    }
}
