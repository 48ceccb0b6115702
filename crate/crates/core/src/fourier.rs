//! Fourier transform of φ on ℝ^d: the ₁F₂ closed form, a Hankel-transform
//! quadrature oracle, the large-z law and the Sobolev-type bound scan.

use crate::error::{Error, Result};
use crate::hypernum::{bessel_j_scaled, eval_pfq, log_gamma, HyperSeries, SummationPolicy};
use crate::quadrature::{integrate, integrate_with_breaks, QuadratureConfig};
use crate::result::EvalResult;
use crate::wendland::{WendlandFunction, WendlandParams};
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierConstants {
    /// C_{λ,μ} = 2^λ Γ(λ) Γ(μ+1) / Γ(2λ+μ)
    pub c_lambda_mu: f64,
    /// C_{λ,μ} / (√(2π) ε^d)
    pub prefactor: f64,
}

impl FourierConstants {
    pub fn new(params: &WendlandParams) -> Self {
        let (lam, mu) = (params.lambda(), params.mu());
        let c = c_lambda_mu(lam, mu);
        FourierConstants {
            c_lambda_mu: c,
            prefactor: c / ((2.0 * PI).sqrt() * params.epsilon().powi(params.d() as i32)),
        }
    }
}

/// 2^λ Γ(λ) Γ(μ+1) / Γ(2λ+μ), also used with λ − 1/2 on the sphere.
pub fn c_lambda_mu(lam: f64, mu: f64) -> f64 {
    let l = lam * 2f64.ln() + log_gamma(lam).unwrap().0 + log_gamma(mu + 1.0).unwrap().0
        - log_gamma(2.0 * lam + mu).unwrap().0;
    l.exp()
}

/// ₁F₂(λ; λ+μ/2, λ+(μ+1)/2; −(z/2ε)²)
pub fn ft_series(z: f64, params: &WendlandParams) -> Result<HyperSeries> {
    let (lam, mu) = (params.lambda(), params.mu());
    let x = z / (2.0 * params.epsilon());
    HyperSeries::new(&[lam], &[lam + mu / 2.0, lam + (mu + 1.0) / 2.0], -x * x)
}

/// φ̂(z) in closed form.
pub fn ft_closed(z: f64, params: &WendlandParams) -> Result<EvalResult> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!("z = {z} must be finite and nonnegative")));
    }
    let k = FourierConstants::new(params).prefactor;
    let mut out = eval_pfq(&ft_series(z, params)?, &SummationPolicy::default())?.scaled(k);
    out.flags.outside_positivity = !params.pd_euclidean();
    Ok(out)
}

/// w^{−ν} J_ν(w) with ν = d/2 − 1, including ν = −1/2 for d = 1.
fn radial_kernel(d: usize, w: f64) -> f64 {
    if d == 1 {
        (2.0 / PI).sqrt() * w.cos()
    } else {
        bessel_j_scaled(d as f64 / 2.0 - 1.0, w)
    }
}

/// z^{1−d/2} ∫₀^{1/ε} φ(y) y^{d/2} J_{d/2−1}(yz) dy by adaptive quadrature.
pub fn ft_oracle(z: f64, params: &WendlandParams, cfg: &QuadratureConfig) -> Result<EvalResult> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!("oracle needs z > 0, got {z}")));
    }
    let phi = WendlandFunction::new(params);
    let d = params.d();
    let support = params.support_radius();
    let pieces = ((z * support / PI).ceil() as usize).max(1);
    let breaks: Vec<f64> = (0..=pieces).map(|k| support * k as f64 / pieces as f64).collect();
    let err_cell = std::cell::Cell::new(None);
    let f = |y: f64| match phi.value(y) {
        Ok(v) => v * y.powi(d as i32 - 1) * radial_kernel(d, y * z),
        Err(e) => {
            err_cell.set(Some(e));
            0.0
        }
    };
    let out = integrate_with_breaks(f, &breaks, cfg)?;
    if let Some(e) = err_cell.take() {
        return Err(e);
    }
    Ok(out)
}

/// Leading large-z term 2^λ Γ(λ) μ ε^{2α+1} / (√(2π) z^{2λ}), optionally with
/// the first oscillatory correction.
pub fn ft_asymptotic(z: f64, params: &WendlandParams, include_oscillatory: bool) -> f64 {
    let (lam, mu, eps) = (params.lambda(), params.mu(), params.epsilon());
    let lead = (lam * 2f64.ln() + log_gamma(lam).unwrap().0 + mu.ln() + (2.0 * params.alpha() + 1.0) * eps.ln()
        - 0.5 * (2.0 * PI).ln()
        - 2.0 * lam * z.ln())
    .exp();
    if !include_oscillatory {
        return lead;
    }
    let k = FourierConstants::new(params).prefactor;
    let (b1, b2) = (lam + mu / 2.0, lam + (mu + 1.0) / 2.0);
    let amp = (log_gamma(b1).unwrap().0 + log_gamma(b2).unwrap().0
        - 0.5 * PI.ln()
        - log_gamma(lam).unwrap().0
        + (lam + mu) * (2.0 * eps / z).ln())
    .exp();
    lead + k * amp * (z / eps - PI * (lam + mu) / 2.0).cos()
}

/// (1/w) ∫_{c−w/2}^{c+w/2} f.
pub fn period_average<F: Fn(f64) -> f64>(f: F, center: f64, width: f64) -> Result<f64> {
    let cfg = QuadratureConfig::with_tolerances(1e-12, 1e-300);
    Ok(integrate(f, center - width / 2.0, center + width / 2.0, &cfg)?.value / width)
}

/// Empirical min and max of φ̂(z)(1+z²)^λ / ε^{2α+1} over `z_grid`.
pub fn sobolev_bounds_euclid(params: &WendlandParams, z_grid: &[f64]) -> Result<(f64, f64)> {
    if z_grid.is_empty() {
        return Err(Error::InvalidParameter("empty z grid".into()));
    }
    let lam = params.lambda();
    let scale = params.epsilon().powf(2.0 * params.alpha() + 1.0);
    let vals: Vec<(f64, f64)> = z_grid
        .par_iter()
        .map(|&z| ft_closed(z, params).map(|r| (z, r.value)))
        .collect::<Result<_>>()?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (z, v) in vals {
        if !(v > 0.0) {
            return Err(Error::NonPositiveTransform { z, value: v });
        }
        let r = v * (1.0 + z * z).powf(lam) / scale;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}


#[cfg(test)]
mod tests {
    use super::*;

    fn p(mu: f64, alpha: f64, eps: f64, d: usize) -> WendlandParams {
        WendlandParams::new(mu, alpha, eps, d).unwrap()
    }

    fn tight() -> QuadratureConfig {
        QuadratureConfig::with_tolerances(1e-12, 1e-300)
    }

    #[test]
    fn value_at_zero_is_prefactor() {
        let w = p(4.0, 1.0, 0.7, 3);
        let k = FourierConstants::new(&w);
        assert_eq!(ft_closed(0.0, &w).unwrap().value, k.prefactor);
        assert!(k.c_lambda_mu > 0.0 && k.prefactor > 0.0);
    }

    #[test]
    fn closed_matches_oracle() {
        for (w, z) in [(p(3.0, 1.0, 1.0, 3), 2.0), (p(2.0, 0.5, 1.0, 1), 1.0), (p(4.0, 1.5, 0.5, 4), 7.0)] {
            let a = ft_closed(z, &w).unwrap().value;
            let b = ft_oracle(z, &w, &tight()).unwrap().value;
            assert!(((a - b) / a).abs() < 1e-9, "{w:?} z={z}: {a} vs {b}");
        }
    }

    #[test]
    fn oracle_near_origin() {
        let w = p(4.0, 1.0, 1.0, 3);
        let a = ft_closed(0.0, &w).unwrap().value;
        let b = ft_oracle(1e-3, &w, &tight()).unwrap().value;
        assert!(((a - b) / a).abs() < 1e-6);
    }

    #[test]
    fn leading_term_power_law() {
        let w = p(4.0, 1.0, 1.0, 3);
        let z = 37.0;
        let lam = w.lambda();
        let a = ft_asymptotic(z, &w, false);
        let b = ft_asymptotic(2f64.powf(1.0 / (2.0 * lam)) * z, &w, false);
        assert!((a / b - 2.0).abs() < 1e-13);
        // ε^{2α+1} scaling
        let w2 = p(4.0, 1.0, 2.0, 3);
        assert!((ft_asymptotic(z, &w2, false) / a - 8.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_correction_helps() {
        let w = p(4.0, 1.0, 1.0, 3);
        for z in [1000.0, 1001.3, 1502.7] {
            let exact = ft_closed(z, &w).unwrap().value;
            let e1 = (ft_asymptotic(z, &w, false) - exact).abs();
            let e2 = (ft_asymptotic(z, &w, true) - exact).abs();
            assert!(e2 < 0.2 * e1, "z={z}: {e1} {e2}");
        }
    }

    #[test]
    fn negative_z_rejected() {
        let w = p(4.0, 1.0, 1.0, 3);
        assert!(ft_closed(-1.0, &w).is_err());
        assert!(ft_oracle(0.0, &w, &tight()).is_err());
    }
}
