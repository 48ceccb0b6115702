use gwendland::fourier::ft_closed;
use gwendland::hypernum::{eval_pfq, log_gamma, pochhammer_dd, DoubleWord, HyperSeries, SummationPolicy};
use gwendland::quadrature::{integrate, QuadratureConfig};
use gwendland::schoenberg::{
    coeff_closed, coeff_series, reconstruct_kernel, truncation_estimate, CapGeometry, SchoenbergTable,
};
use gwendland::wendland::{eval, polynomial_closed_form, WendlandFunction, WendlandParams};
use gwendland::{Error, Method};
use proptest::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::with_tolerances(1e-13, 1e-300)
}

fn dd_rel(a: DoubleWord, b: DoubleWord) -> f64 {
    if a.hi == 0.0 && b.hi == 0.0 {
        return 0.0;
    }
    ((a - b) / a).to_f64().abs()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn pochhammer_splits(num in -400i32..400, m in 0usize..25, n in 0usize..25) {
        // a on a 1/64 lattice so that a + m is exact
        let a = num as f64 / 64.0;
        let lhs = pochhammer_dd(a, m + n);
        let rhs = pochhammer_dd(a, m) * pochhammer_dd(a + m as f64, n);
        prop_assert!(dd_rel(lhs, rhs) < 1e-28, "a={a} m={m} n={n}");
    }

    #[test]
    fn zero_numerator_gives_one(b in 0.1f64..9.0, c in 0.3f64..7.0, z in -50.0f64..0.99, at in 0usize..3) {
        let mut nums = vec![b, 2.5];
        nums.insert(at.min(2), 0.0);
        let r = eval_pfq(&HyperSeries::new(&nums, &[c, c + 0.5], z).unwrap(), &SummationPolicy::default()).unwrap();
        prop_assert_eq!(r.value, 1.0);
    }

    #[test]
    fn terminating_routes_agree(n in 1usize..60, b in 0.2f64..6.0, c in 0.5f64..6.0, e in 0.5f64..6.0, z in 0.05f64..1.0) {
        let s = HyperSeries::new(&[-(n as f64), n as f64 + 1.0, b], &[c, e], z).unwrap();
        let log = eval_pfq(&s, &SummationPolicy::forced(Method::LogDomainSigned));
        let dd = eval_pfq(&s, &SummationPolicy::forced(Method::ExtendedPrecision));
        if let (Ok(log), Ok(dd)) = (log, dd) {
            // double-precision log summation loses about u·ratio, which its own estimate covers
            let diff = (log.value - dd.value).abs();
            if dd.cancellation_ratio < 1e3 {
                prop_assert!(diff <= 1e-11 * dd.value.abs(), "{} {}", log.value, dd.value);
            } else if dd.cancellation_ratio < 1e10 {
                prop_assert!(diff <= (1e-11 * dd.value.abs()).max(log.abs_error_estimate), "{} {}", log.value, dd.value);
            }
            prop_assert_eq!(dd.terms_or_nodes, n + 1);
        }
    }

    #[test]
    fn quadrature_is_linear(a in -2.0f64..0.0, b in 0.5f64..4.0, k in 0.5f64..6.0, wa in -3.0f64..3.0, wb in -3.0f64..3.0) {
        let f = |x: f64| (k * x).sin() * (-x).exp();
        let g = |x: f64| 1.0 / (1.0 + x * x);
        let c = cfg();
        let (rf, rg) = (integrate(f, a, b, &c).unwrap(), integrate(g, a, b, &c).unwrap());
        let rh = integrate(|x| wa * f(x) + wb * g(x), a, b, &c).unwrap();
        let diff = (rh.value - (wa * rf.value + wb * rg.value)).abs();
        let budget = 10.0 * (rh.abs_error_estimate + wa.abs() * rf.abs_error_estimate + wb.abs() * rg.abs_error_estimate);
        prop_assert!(diff <= budget, "{diff:e} > {budget:e}");
    }

    #[test]
    fn quadrature_is_additive(a in -2.0f64..0.0, t in 0.05f64..0.95, len in 0.5f64..5.0, p in 0.0f64..1.5) {
        // endpoint singularity (x − a)^{p−1/2} exercises the adaptive refinement
        let f = |x: f64| if x > a { (x - a).powf(p - 0.5) * (3.0 * x).cos() } else { 0.0 };
        let (b, c) = (a + t * len, a + len);
        let q = cfg();
        // a strong singularity may exhaust subdivision; the partial result still carries its estimate
        let run = |lo: f64, hi: f64| match integrate(f, lo, hi, &q) {
            Ok(r) => (r.value, r.abs_error_estimate),
            Err(Error::SubdivisionLimit { value, error }) => (value, error),
            Err(e) => panic!("{e}"),
        };
        let (whole, left, right) = (run(a, c), run(a, b), run(b, c));
        let diff = (whole.0 - left.0 - right.0).abs();
        let budget = whole.1 + left.1 + right.1;
        prop_assert!(diff <= budget.max(4.0 * f64::EPSILON * whole.0.abs()), "{diff:e} > {budget:e}");
    }

    #[test]
    fn support_and_scaling(mu in 0.5f64..8.0, alpha in 0.3f64..3.0, eps in 0.3f64..3.0, r in 0.0f64..4.0) {
        let w = WendlandParams::new(mu, alpha, eps, 3).unwrap();
        let one = w.with_epsilon(1.0).unwrap();
        let got = eval(r, &w, &cfg()).unwrap().value;
        let scaled = eval(eps * r, &one, &cfg()).unwrap().value;
        prop_assert_eq!(got, scaled);
        if eps * r >= 1.0 {
            prop_assert_eq!(got, 0.0);
            prop_assert_eq!(WendlandFunction::new(&w).value(r).unwrap(), 0.0);
        }
    }

    #[test]
    fn nonincreasing_in_r(mu in 1.0f64..8.0, alpha in 0.2f64..3.5, eps in 0.5f64..2.0) {
        let w = WendlandParams::new(mu, alpha, eps, 2).unwrap();
        let phi = WendlandFunction::new(&w);
        let vals: Vec<f64> = (0..200).map(|k| phi.value(k as f64 / (199.0 * eps)).unwrap()).collect();
        let slack = 4.0 * f64::EPSILON * vals[0];
        prop_assert!(vals.windows(2).all(|p| p[1] <= p[0] + slack));
        // continuity at the support edge
        let edge: Vec<f64> = [1e-3, 1e-5, 1e-7].iter().map(|d| phi.value((1.0 - d) / eps).unwrap()).collect();
        prop_assert!(edge[0] < 1e-2 * vals[0] && edge[1] <= edge[0] && edge[2] <= edge[1], "{edge:?}");
    }

    #[test]
    fn polynomial_matches_quadrature(mu in 0u32..8, alpha in 1u32..4, s in 0.0f64..1.0) {
        let w = WendlandParams::new(mu as f64, alpha as f64, 1.0, 3).unwrap();
        let poly = polynomial_closed_form(&w).unwrap();
        let q = eval(s, &w, &cfg()).unwrap().value;
        prop_assert!((poly.evaluate(s) - q).abs() <= 1e-12 * poly.evaluate(0.0));
    }

    #[test]
    fn fourier_epsilon_scaling(d in 1usize..6, alpha in 0.5f64..3.0, extra in 0.0f64..3.0, eps in 0.4f64..3.0, z in 0.1f64..60.0) {
        let lam = (d as f64 + 1.0) / 2.0 + alpha;
        let w = WendlandParams::new(lam + extra, alpha, eps, d).unwrap();
        let one = w.with_epsilon(1.0).unwrap();
        let lhs = ft_closed(z, &w).unwrap().value;
        let rhs = eps.powi(-(d as i32)) * ft_closed(z / eps, &one).unwrap().value;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs(), "{lhs} {rhs}");
    }

    #[test]
    fn fourier_positive_when_mu_at_least_lambda(d in 1usize..6, alpha in 0.5f64..3.0, extra in 0.0f64..3.0, z in 0.001f64..100.0) {
        let lam = (d as f64 + 1.0) / 2.0 + alpha;
        let w = WendlandParams::new(lam + extra, alpha, 1.0, d).unwrap();
        prop_assert!(ft_closed(z, &w).unwrap().value > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn coefficients_positive_when_mu_at_least_lambda(d in 2usize..6, alpha in 0.5f64..2.5, extra in 0.0f64..2.0, eps in 0.5f64..2.0, m in 0usize..=400) {
        let lam = (d as f64 + 1.0) / 2.0 + alpha;
        let w = WendlandParams::new(lam + extra, alpha, eps, d).unwrap();
        let c = coeff_closed(m, &w).unwrap();
        prop_assert!(c.value > 0.0, "ψ̂({m}) = {}", c.value);
    }

    #[test]
    fn odd_dimension_terminates(k in 1usize..3, alpha in 0.5f64..2.5, eps in 0.5f64..2.0, m in 0usize..80) {
        let d = 2 * k + 1;
        let lam = (d as f64 + 1.0) / 2.0 + alpha;
        let w = WendlandParams::new(lam, alpha, eps, d).unwrap();
        let s = coeff_series(m, &w).unwrap();
        let n = m + (d - 3) / 2;
        prop_assert_eq!(s.termination_index(), Some(n));
        match eval_pfq(&s, &SummationPolicy::series_only()) {
            Ok(r) => prop_assert_eq!(r.terms_or_nodes, n + 1),
            Err(Error::PrecisionExhausted { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

#[test]
fn log_gamma_recurrence() {
    for k in 0..=60 {
        let x = 0.1 * 1000f64.powf(k as f64 / 60.0);
        let (l1, s1) = log_gamma(x + 1.0).unwrap();
        let (l0, s0) = log_gamma(x).unwrap();
        let rel = ((l1 - l0 - x.ln()).exp() * s1 * s0 - 1.0).abs();
        assert!(rel < 1e-13, "x={x} {rel:e}");
    }
}

#[test]
fn reconstruction_within_tail_bound() {
    let w = WendlandParams::new(4.0, 1.0, 1.0, 3).unwrap();
    let full = SchoenbergTable::build(&w, 80).unwrap();
    let phi = WendlandFunction::new(&w);
    let mut last = f64::INFINITY;
    for big_m in [20usize, 40, 80] {
        let table = full.truncated(big_m);
        let sup = (0..=100)
            .map(|k| {
                let t = -1.0 + 0.02 * k as f64;
                let exact = phi.value((2.0 - 2.0 * t).max(0.0).sqrt()).unwrap();
                (reconstruct_kernel(t, &table).unwrap().value - exact).abs()
            })
            .fold(0.0, f64::max);
        assert!(sup < last);
        assert!(sup <= 2.0 * truncation_estimate(&w, big_m), "M={big_m} {sup:e}");
        last = sup;
    }
}

#[test]
fn reconstruction_vanishes_outside_cap() {
    for w in [WendlandParams::new(4.0, 1.0, 1.0, 3).unwrap(), WendlandParams::new(4.5, 1.5, 1.5, 5).unwrap()] {
        let ts = CapGeometry::new(&w).unwrap().t_support();
        let table = SchoenbergTable::build(&w, 120).unwrap();
        for k in 1..=10 {
            let t = -1.0 + (ts + 1.0) * k as f64 / 11.0;
            let r = reconstruct_kernel(t, &table).unwrap();
            assert!(r.value.abs() <= r.abs_error_estimate, "t={t} {} {}", r.value, r.abs_error_estimate);
        }
    }
}
