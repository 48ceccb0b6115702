//! Spherical side: restriction of φ to S^{d−1}, its d-Schoenberg
//! coefficients in closed ₃F₂ form, oracles, asymptotics and the
//! spherical-harmonic reconstruction.

mod asymptotics;
mod oracles;

pub use asymptotics::{
    asymptotic_3f2, asymptotic_3f2_terms, coeff_asymptotic, k_constant, AsymptoticOrder,
};
pub use oracles::{
    coeff_oracle_linkup, coeff_oracle_projection, finite_integral_quadrature, finite_integral_series,
    linkup_horizon, linkup_tail,
};

use crate::error::{Error, Result};
use crate::fourier::c_lambda_mu;
use crate::hypernum::euler::legendre_shape;
use crate::hypernum::{eval_pfq, gegenbauer_normalized_all, legendre_3f2_ladder, log_gamma, HyperSeries, SummationPolicy};
use crate::result::EvalResult;
use crate::wendland::WendlandParams;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Upper bound on table degree accepted anywhere in the crate.
pub const MAX_DEGREE: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapGeometry {
    /// Angular radius of the support cap, arccos(1 − 1/(2ε²)).
    pub theta_support: f64,
}

impl CapGeometry {
    pub fn new(params: &WendlandParams) -> Result<Self> {
        params.require_sphere()?;
        let eps = params.epsilon();
        let theta = if eps == 0.5 { PI } else { (1.0 - 1.0 / (2.0 * eps * eps)).acos() };
        Ok(CapGeometry { theta_support: theta })
    }

    /// cos θ_support; kernel values vanish for t below this.
    pub fn t_support(&self) -> f64 {
        self.theta_support.cos()
    }
}

/// Dimension of the space of degree-m spherical harmonics on S^{d−1}.
pub fn n_mdim(m: usize, d: usize) -> u64 {
    assert!(d >= 2, "n_mdim needs d ≥ 2");
    if m == 0 {
        return 1;
    }
    if d == 2 {
        return 2;
    }
    // binomial(m+d−3, m−1) · (2m+d−2) / m
    let k = (m - 1).min(d - 2) as u64;
    let n = (m + d - 3) as u64;
    let mut b: u128 = 1;
    for j in 0..k {
        b = b * (n - j) as u128 / (j + 1) as u128;
    }
    (b * (2 * m + d - 2) as u128 / m as u128) as u64
}

/// Surface area of S^k, 2π^{(k+1)/2}/Γ((k+1)/2).
pub fn sphere_area(k: usize) -> f64 {
    let h = (k as f64 + 1.0) / 2.0;
    2.0 * (h * PI.ln() - log_gamma(h).unwrap().0).exp()
}

/// (2π)^{(d−1)/2} C_{λ−1/2,μ} / (√(2π) ε^{d−1}).
pub fn prefactor(params: &WendlandParams) -> f64 {
    let d = params.d() as f64;
    let c = c_lambda_mu(params.lambda() - 0.5, params.mu());
    (0.5 * (d - 1.0) * (2.0 * PI).ln() + c.ln() - 0.5 * (2.0 * PI).ln() - (d - 1.0) * params.epsilon().ln()).exp()
}

/// ₃F₂(−(m+(d−3)/2), m+(d−1)/2, λ−1/2; λ+(μ−1)/2, λ+μ/2; 1/(4ε²)).
pub fn coeff_series(m: usize, params: &WendlandParams) -> Result<HyperSeries> {
    let (lam, mu, eps) = (params.lambda(), params.mu(), params.epsilon());
    let nu = m as f64 + (params.d() as f64 - 3.0) / 2.0;
    HyperSeries::new(&[-nu, nu + 1.0, lam - 0.5], &[lam + (mu - 1.0) / 2.0, lam + mu / 2.0], 1.0 / (4.0 * eps * eps))
}

/// ψ̂(m) in closed form.
pub fn coeff_closed(m: usize, params: &WendlandParams) -> Result<EvalResult> {
    coeff_with(m, params, &SummationPolicy::default())
}

fn coeff_with(m: usize, params: &WendlandParams, pol: &SummationPolicy) -> Result<EvalResult> {
    params.require_sphere()?;
    let mut out = eval_pfq(&coeff_series(m, params)?, pol)?.scaled(prefactor(params));
    out.flags.outside_positivity = !params.pd_euclidean();
    Ok(out)
}

/// ψ̂(0..=M) for one parameter bundle.
#[derive(Debug, Clone)]
pub struct SchoenbergTable {
    params: WendlandParams,
    prefactor: f64,
    coeffs: Vec<EvalResult>,
}

impl SchoenbergTable {
    /// Plain/extended series per degree in parallel; from the first degree
    /// where the series runs out of precision onward, every entry comes from
    /// one Euler-integral ladder.
    pub fn build(params: &WendlandParams, max_m: usize) -> Result<Self> {
        params.require_sphere()?;
        if max_m > MAX_DEGREE {
            return Err(Error::InvalidParameter(format!("M = {max_m} exceeds {MAX_DEGREE}")));
        }
        let pol = SummationPolicy { alternative_routes: false, ..SummationPolicy::default() };
        let first: Vec<Result<EvalResult>> = (0..=max_m).into_par_iter().map(|m| coeff_with(m, params, &pol)).collect();
        let split = first.iter().position(|r| matches!(r, Err(Error::PrecisionExhausted { .. })));
        let mut coeffs = Vec::with_capacity(max_m + 1);
        for r in first.into_iter().take(split.unwrap_or(max_m + 1)) {
            coeffs.push(r?);
        }
        if let Some(m0) = split {
            let pre = prefactor(params);
            let series = coeff_series(max_m, params)?;
            let Some((nu_max, a, b, c)) = legendre_shape(&series) else {
                return Err(Error::PrecisionExhausted { ratio: f64::INFINITY });
            };
            let ladder = legendre_3f2_ladder(nu_max, a, b, c, series.argument())?;
            let nu0 = ladder_base(nu_max);
            for m in m0..=max_m {
                let nu = m as f64 + (params.d() as f64 - 3.0) / 2.0;
                let k = (nu - (nu0 - 1.0)).round() as usize;
                let mut r = ladder[k].scaled(pre);
                r.flags.outside_positivity = !params.pd_euclidean();
                coeffs.push(r);
            }
        }
        Ok(SchoenbergTable { params: *params, prefactor: prefactor(params), coeffs })
    }

    pub fn params(&self) -> &WendlandParams {
        &self.params
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn coeffs(&self) -> &[EvalResult] {
        &self.coeffs
    }

    pub fn get(&self, m: usize) -> Option<&EvalResult> {
        self.coeffs.get(m)
    }

    /// Shorter table sharing the same entries.
    pub fn truncated(&self, max_m: usize) -> SchoenbergTable {
        SchoenbergTable {
            params: self.params,
            prefactor: self.prefactor,
            coeffs: self.coeffs[..=max_m.min(self.max_degree())].to_vec(),
        }
    }
}

fn ladder_base(nu_max: f64) -> f64 {
    let f = nu_max - nu_max.floor();
    if f < 1e-12 || f > 1.0 - 1e-12 {
        0.0
    } else {
        f
    }
}

/// Σ_{m>M} coeff_asymptotic(m) N_{m,d}/ω_{d−1}, the truncation estimate for
/// a degree-M reconstruction.
pub fn truncation_estimate(params: &WendlandParams, max_m: usize) -> f64 {
    let d = params.d();
    let omega = sphere_area(d - 1);
    let extra = 4000;
    let mut s = 0.0;
    let mut last = 0.0;
    for m in max_m + 1..=max_m + extra {
        last = coeff_asymptotic(m, params) * n_mdim(m, d) as f64 / omega;
        s += last;
    }
    // terms fall off like m^{−(2α+2)}
    let p = 2.0 * params.alpha() + 2.0;
    let l = (max_m + extra) as f64;
    s + last * l / (p - 1.0)
}

/// Σ_{m≤M} ψ̂(m) (N_{m,d}/ω_{d−1}) C_m^{(d−2)/2}(t)/C_m^{(d−2)/2}(1).
pub fn reconstruct_kernel(t: f64, table: &SchoenbergTable) -> Result<EvalResult> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} outside [−1, 1]")));
    }
    let d = table.params.d();
    let max_m = table.max_degree();
    let omega = sphere_area(d - 1);
    let basis: Vec<f64> = if d == 2 {
        let th = t.acos();
        (0..=max_m).map(|m| (m as f64 * th).cos()).collect()
    } else {
        gegenbauer_normalized_all(max_m, (d as f64 - 2.0) / 2.0, t)
    };
    let mut sum = 0.0;
    let mut coeff_err = 0.0;
    let mut peak = 0.0f64;
    for (m, c) in table.coeffs.iter().enumerate() {
        let w = n_mdim(m, d) as f64 / omega;
        sum += c.value * w * basis[m];
        peak = peak.max(sum.abs());
        coeff_err += c.abs_error_estimate * w;
    }
    // the coefficients approach their asymptote from above; rescale the
    // asymptotic tail by the ratio observed at the last tabulated degree
    let last = table.coeffs[max_m].value / coeff_asymptotic(max_m, &table.params);
    let err = coeff_err + truncation_estimate(&table.params, max_m) * last.max(1.0);
    let mut out = EvalResult::new(sum, err, crate::result::Method::PlainSum, max_m + 1)
        .with_cancellation(crate::result::ratio_of(peak, sum));
    out.flags.outside_positivity = !table.params.pd_euclidean();
    Ok(out)
}

/// λ − 1/2 = (d + 2α)/2, the order of the Sobolev space on S^{d−1}.
pub fn sobolev_index(params: &WendlandParams) -> f64 {
    params.lambda() - 0.5
}

/// Empirical min and max of ψ̂(m)(1+m²)^{λ−1/2}/ε^{2α+1} over the table.
pub fn sobolev_bounds_sphere(table: &SchoenbergTable) -> Result<(f64, f64)> {
    let p = &table.params;
    let s = sobolev_index(p);
    let scale = p.epsilon().powf(2.0 * p.alpha() + 1.0);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (m, c) in table.coeffs.iter().enumerate() {
        if !(c.value > 0.0) {
            return Err(Error::NonPositiveCoefficient { m, value: c.value });
        }
        let mf = m as f64;
        let r = c.value * (1.0 + mf * mf).powf(s) / scale;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureConfig;
    use crate::result::Method;

    fn p(mu: f64, alpha: f64, eps: f64, d: usize) -> WendlandParams {
        WendlandParams::new(mu, alpha, eps, d).unwrap()
    }

    fn tight() -> QuadratureConfig {
        QuadratureConfig::with_tolerances(1e-12, 1e-300)
    }

    #[test]
    fn harmonic_dimensions() {
        for d in 2..8 {
            assert_eq!(n_mdim(0, d), 1);
        }
        assert_eq!(n_mdim(3, 3), 7);
        assert_eq!(n_mdim(2, 4), 9);
        assert_eq!(n_mdim(5, 2), 2);
        for m in 0..20 {
            assert_eq!(n_mdim(m, 3), 2 * m as u64 + 1);
            assert_eq!(n_mdim(m, 4), (m as u64 + 1).pow(2));
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(0) - 2.0).abs() < 1e-15);
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn cap_radius() {
        assert_eq!(CapGeometry::new(&p(4.0, 1.0, 0.5, 3)).unwrap().theta_support, PI);
        let c = CapGeometry::new(&p(4.0, 1.0, 1.0, 3)).unwrap();
        assert!((c.theta_support - PI / 3.0).abs() < 1e-15);
        assert!(CapGeometry::new(&p(4.0, 1.0, 0.49, 3)).is_err());
        assert!(CapGeometry::new(&p(4.0, 1.0, 1.0, 1)).is_err());
    }

    #[test]
    fn degree_zero_is_prefactor_in_three_dimensions() {
        let w = p(4.0, 1.0, 1.0, 3);
        let r = coeff_closed(0, &w).unwrap();
        assert_eq!(r.value, prefactor(&w));
        assert_eq!(r.terms_or_nodes, 1);
        let c = c_lambda_mu(w.lambda() - 0.5, w.mu());
        let want = 2.0 * PI * c / (2.0 * PI).sqrt();
        assert!(((r.value - want) / want).abs() < 1e-14);
    }

    #[test]
    fn terminating_term_count() {
        let w = p(4.0, 1.0, 1.0, 5);
        for m in [0usize, 3, 11] {
            let s = coeff_series(m, &w).unwrap();
            assert_eq!(s.termination_index(), Some(m + 1));
            let r = eval_pfq(&s, &SummationPolicy::series_only()).unwrap();
            assert_eq!(r.terms_or_nodes, m + 2);
        }
    }

    #[test]
    fn closed_matches_projection() {
        let cfg = tight();
        for (w, m, tol) in [
            (p(4.0, 1.0, 1.0, 3), 5, 1e-8),
            (p(4.0, 1.0, 1.0, 3), 7, 1e-8),
            (p(2.0, 0.5, 0.5, 2), 3, 1e-6),
            (p(4.0, 1.5, 0.7, 4), 4, 1e-7),
        ] {
            let a = coeff_closed(m, &w).unwrap().value;
            let b = coeff_oracle_projection(m, &w, &cfg).unwrap().value;
            assert!(((a - b) / a).abs() < tol, "{w:?} m={m}: {a} vs {b}");
        }
    }

    #[test]
    fn table_switches_to_ladder() {
        let w = p(4.0, 1.0, 1.0, 3);
        let t = SchoenbergTable::build(&w, 260).unwrap();
        assert_eq!(t.max_degree(), 260);
        assert!(t.coeffs().iter().all(|c| c.value > 0.0 && c.is_finite()));
        assert_eq!(t.get(260).unwrap().method, Method::Quadrature);
        for m in [0usize, 10, 40] {
            assert_eq!(t.get(m).unwrap().value, coeff_closed(m, &w).unwrap().value);
        }
    }

    #[test]
    fn reconstruction_at_pole_approaches_origin_value() {
        let w = p(4.0, 1.0, 1.0, 3);
        let t = SchoenbergTable::build(&w, 80).unwrap();
        let r = reconstruct_kernel(1.0, &t).unwrap();
        let phi0 = crate::wendland::value_at_origin(&w);
        assert!((r.value - phi0).abs() <= r.abs_error_estimate, "{} {} {}", r.value, phi0, r.abs_error_estimate);
        assert!((r.value - phi0).abs() < 1e-4);
    }

    #[test]
    fn reconstruction_outside_cap_small() {
        let w = p(4.0, 1.0, 1.0, 3);
        let t = SchoenbergTable::build(&w, 60).unwrap();
        let r = reconstruct_kernel(-0.3, &t).unwrap();
        assert!(r.value.abs() <= r.abs_error_estimate);
    }

    #[test]
    fn sobolev_scan() {
        let w = p(4.0, 1.0, 1.0, 3);
        let t = SchoenbergTable::build(&w, 200).unwrap();
        let (lo, hi) = sobolev_bounds_sphere(&t).unwrap();
        assert!(0.0 < lo && lo < hi && hi.is_finite());
        assert_eq!(sobolev_index(&w), (3.0 + 2.0) / 2.0);
    }
}
