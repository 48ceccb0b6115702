//! Generalized hypergeometric series pFq(a; b; z).

use super::asymptotic;
use super::dd::{DoubleWord, DD_EPS};
use super::euler;
use crate::error::{Error, Result};
use crate::result::{ratio_of, EvalResult, Method};

const INTEGER_TOL: f64 = 1e-12;
const U: f64 = f64::EPSILON * 0.5;
/// ₁F₂ at −x² is tried asymptotically from this x upward.
const ASYMPTOTIC_FROM: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct HyperSeries {
    numerators: Vec<f64>,
    denominators: Vec<f64>,
    argument: f64,
    termination: Option<usize>,
}

fn near_nonpositive_integer(x: f64) -> Option<usize> {
    let r = x.round();
    if r <= 0.0 && (x - r).abs() <= INTEGER_TOL {
        Some((-r) as usize)
    } else {
        None
    }
}

impl HyperSeries {
    /// Numerators within 1e−12 of a non-positive integer are snapped to it,
    /// so the series terminates exactly.
    pub fn new(numerators: &[f64], denominators: &[f64], argument: f64) -> Result<Self> {
        if numerators.iter().chain(denominators).any(|v| !v.is_finite()) || !argument.is_finite() {
            return Err(Error::InvalidParameter("hypergeometric parameters must be finite".into()));
        }
        if let Some(b) = denominators.iter().find(|b| near_nonpositive_integer(**b).is_some()) {
            return Err(Error::InvalidParameter(format!("denominator parameter {b} is a non-positive integer")));
        }
        let mut termination: Option<usize> = None;
        let numerators: Vec<f64> = numerators
            .iter()
            .map(|&a| match near_nonpositive_integer(a) {
                Some(n) => {
                    termination = Some(termination.map_or(n, |t| t.min(n)));
                    -(n as f64)
                }
                None => a,
            })
            .collect();
        Ok(HyperSeries { numerators, denominators: denominators.to_vec(), argument, termination })
    }

    pub fn numerators(&self) -> &[f64] {
        &self.numerators
    }

    pub fn denominators(&self) -> &[f64] {
        &self.denominators
    }

    pub fn argument(&self) -> f64 {
        self.argument
    }

    pub fn is_terminating(&self) -> bool {
        self.termination.is_some()
    }

    /// Index n of the last nonzero term of a terminating series.
    pub fn termination_index(&self) -> Option<usize> {
        self.termination
    }

    fn p(&self) -> usize {
        self.numerators.len()
    }

    fn q(&self) -> usize {
        self.denominators.len()
    }

    fn check_convergence(&self) -> Result<()> {
        if self.termination.is_some() || self.argument == 0.0 || self.p() <= self.q() {
            return Ok(());
        }
        let z = self.argument.abs();
        if self.p() > self.q() + 1 {
            return Err(Error::Divergent(format!("{}F{} with z ≠ 0", self.p(), self.q())));
        }
        let excess: f64 = self.denominators.iter().sum::<f64>() - self.numerators.iter().sum::<f64>();
        if z < 1.0 || (z == 1.0 && excess > 0.0) {
            Ok(())
        } else {
            Err(Error::Divergent(format!("|z| = {z} with Σb − Σa = {excess}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummationPolicy {
    /// Requested relative accuracy of the returned value.
    pub rel_tol: f64,
    /// Stop a non-terminating sum after three terms below this fraction of the sum.
    pub stop_ratio: f64,
    pub max_terms: usize,
    /// Cancellation ratio above which plain double sums are not trusted.
    pub escalate_ratio: f64,
    /// Cancellation ratio beyond the reach of double-word sums.
    pub exhausted_ratio: f64,
    /// Allow asymptotic and Euler-integral routes.
    pub alternative_routes: bool,
    /// Use exactly this method (errors if it is not applicable).
    pub force: Option<Method>,
}

impl Default for SummationPolicy {
    fn default() -> Self {
        SummationPolicy {
            rel_tol: 1e-13,
            stop_ratio: 1e-17,
            max_terms: 100_000,
            escalate_ratio: 1e10,
            exhausted_ratio: 1e26,
            alternative_routes: true,
            force: None,
        }
    }
}

impl SummationPolicy {
    pub fn series_only() -> Self {
        SummationPolicy { alternative_routes: false, ..Default::default() }
    }

    pub fn forced(method: Method) -> Self {
        SummationPolicy { force: Some(method), ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    value: f64,
    err: f64,
    peak: f64,
    terms: usize,
}

impl Outcome {
    fn ratio(&self) -> f64 {
        ratio_of(self.peak, self.value)
    }

    fn finite(&self) -> bool {
        self.value.is_finite() && self.err.is_finite() && self.peak.is_finite()
    }

    fn into_result(self, method: Method) -> EvalResult {
        EvalResult::new(self.value, self.err, method, self.terms).with_cancellation(self.ratio())
    }
}

/// Truncation error of a stopped non-terminating sum, with an optional tail
/// correction for the slowly convergent |z| = 1 case.
fn tail(series: &HyperSeries, last_term: f64, last_ratio: f64, j: usize) -> (f64, f64) {
    if series.termination.is_some() {
        return (0.0, 0.0);
    }
    let r = last_ratio.abs();
    if series.argument == 1.0 && series.p() == series.q() + 1 {
        // Terms behave like C j^{−s}; Σ_{k>j} ≈ t_j (j/(s−1) − 1/2).
        let s = series.denominators.iter().sum::<f64>() - series.numerators.iter().sum::<f64>() + 1.0;
        let jf = j as f64;
        let corr = last_term * (jf / (s - 1.0) - 0.5);
        return (corr, (corr * s / jf).abs() + last_term.abs());
    }
    if r < 1.0 {
        (0.0, last_term.abs() * r / (1.0 - r))
    } else {
        (0.0, last_term.abs())
    }
}

fn term_ratio(series: &HyperSeries, j: f64) -> f64 {
    let mut r = series.argument / (j + 1.0);
    for a in &series.numerators {
        r *= a + j;
    }
    for b in &series.denominators {
        r /= b + j;
    }
    r
}

fn sum_plain(series: &HyperSeries, pol: &SummationPolicy) -> Outcome {
    let (p, q) = (series.p(), series.q());
    let mut t = 1.0f64;
    let mut s = 1.0f64;
    let mut peak = 1.0f64;
    let mut weighted = 1.0f64;
    let mut small = 0;
    let mut j = 0usize;
    let mut last_ratio = 0.0;
    loop {
        if let Some(n) = series.termination {
            if j == n {
                break;
            }
        }
        if j + 1 >= pol.max_terms {
            break;
        }
        last_ratio = term_ratio(series, j as f64);
        t *= last_ratio;
        s += t;
        j += 1;
        peak = peak.max(s.abs());
        weighted += (j as f64 + 1.0).sqrt() * t.abs();
        if !t.is_finite() || !s.is_finite() {
            return Outcome { value: f64::NAN, err: f64::INFINITY, peak: f64::INFINITY, terms: j + 1 };
        }
        if series.termination.is_none() {
            if t.abs() < pol.stop_ratio * s.abs() && last_ratio.abs() < 1.0 {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
        }
    }
    let (corr, trunc) = tail(series, t, last_ratio, j);
    let value = s + corr;
    let err = 2.0 * U * (p + q + 3) as f64 * weighted + U * value.abs() + trunc;
    Outcome { value, err, peak, terms: j + 1 }
}

fn sum_log(series: &HyperSeries, pol: &SummationPolicy) -> Outcome {
    let (p, q) = (series.p(), series.q());
    let z = series.argument;
    let lz = z.abs().ln();
    // ln|t_j| carried as lt + lt_lo so that it does not drift with j
    let mut lt = 0.0f64;
    let mut lt_lo = 0.0f64;
    let mut sign = 1.0f64;
    let mut lref = 0.0f64;
    // Σ t e^{−lref}, Neumaier-compensated
    let mut acc = 1.0f64;
    let mut acc_lo = 0.0f64;
    let mut lpeak = 0.0f64;
    let mut weighted = 1.0f64; // Σ (…)|t| e^{−lref}
    let mut small = 0;
    let mut j = 0usize;
    let mut last_ratio = 0.0;
    loop {
        if let Some(n) = series.termination {
            if j == n {
                break;
            }
        }
        if j + 1 >= pol.max_terms {
            break;
        }
        let jf = j as f64;
        // one logarithm of the whole term ratio when the product is representable
        let mut prod = z.abs() / (jf + 1.0);
        let mut ds = if z < 0.0 { -1.0 } else { 1.0 };
        for a in &series.numerators {
            let f = a + jf;
            prod *= f.abs();
            if f < 0.0 {
                ds = -ds;
            }
        }
        for b in &series.denominators {
            let f = b + jf;
            prod /= f.abs();
            if f < 0.0 {
                ds = -ds;
            }
        }
        let dl = if prod.is_normal() {
            prod.ln()
        } else {
            let mut dl = lz - (jf + 1.0).ln();
            for a in &series.numerators {
                dl += (a + jf).abs().ln();
            }
            for b in &series.denominators {
                dl -= (b + jf).abs().ln();
            }
            dl
        };
        last_ratio = ds * dl.exp();
        let (s_hi, s_err) = two_sum(lt, dl);
        lt = s_hi;
        lt_lo += s_err;
        sign *= ds;
        j += 1;
        let lt_full = lt + lt_lo;
        if lt_full > lref {
            let k = (lref - lt_full).exp();
            acc *= k;
            acc_lo *= k;
            weighted *= k;
            lref = lt_full;
        }
        let term = sign * ((lt - lref) + lt_lo).exp();
        let t_sum = acc + term;
        acc_lo += if acc.abs() >= term.abs() { (acc - t_sum) + term } else { (term - t_sum) + acc };
        acc = t_sum;
        weighted += (1.0 + (p + q + 3) as f64) * term.abs();
        let lsum = (acc + acc_lo).abs().ln() + lref;
        lpeak = lpeak.max(lsum);
        if series.termination.is_none() {
            if lt_full - lsum < pol.stop_ratio.ln() && dl < 0.0 {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
        }
    }
    let scale = lref.exp();
    let last_term = sign * (lt + lt_lo).exp();
    let (corr, trunc) = tail(series, last_term, last_ratio, j);
    let value = (acc + acc_lo) * scale + corr;
    let err = 2.0 * U * weighted * scale + U * value.abs() + trunc;
    Outcome { value, err, peak: lpeak.exp(), terms: j + 1 }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn sum_dd(series: &HyperSeries, pol: &SummationPolicy) -> Outcome {
    let (p, q) = (series.p(), series.q());
    let z = DoubleWord::new(series.argument);
    let mut t = DoubleWord::ONE;
    let mut s = DoubleWord::ONE;
    let mut peak = 1.0f64;
    let mut weighted = 1.0f64;
    let mut small = 0;
    let mut j = 0usize;
    let mut last_ratio = 0.0;
    loop {
        if let Some(n) = series.termination {
            if j == n {
                break;
            }
        }
        if j + 1 >= pol.max_terms {
            break;
        }
        let jf = j as f64;
        let mut num = z;
        for a in &series.numerators {
            num = num * DoubleWord::new(*a).add_f64(jf);
        }
        let mut den = DoubleWord::new(jf + 1.0);
        for b in &series.denominators {
            den = den * DoubleWord::new(*b).add_f64(jf);
        }
        let ratio = num / den;
        last_ratio = ratio.to_f64();
        t = t * ratio;
        s += t;
        j += 1;
        let sf = s.to_f64();
        peak = peak.max(sf.abs());
        weighted += (j as f64 + 1.0).sqrt() * t.hi.abs();
        if !t.is_finite() || !s.is_finite() {
            return Outcome { value: f64::NAN, err: f64::INFINITY, peak: f64::INFINITY, terms: j + 1 };
        }
        if series.termination.is_none() {
            if t.hi.abs() < pol.stop_ratio * sf.abs() && last_ratio.abs() < 1.0 {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
        }
    }
    let (corr, trunc) = tail(series, t.to_f64(), last_ratio, j);
    let value = (s + DoubleWord::new(corr)).to_f64();
    let err = 2.0 * DD_EPS * (p + q + 3) as f64 * weighted + U * value.abs() + trunc;
    Outcome { value, err, peak, terms: j + 1 }
}

fn within(pol: &SummationPolicy, value: f64, err: f64) -> bool {
    err <= pol.rel_tol * value.abs() || (value == 0.0 && err == 0.0)
}

fn is_1f2_negative(series: &HyperSeries) -> bool {
    series.p() == 1 && series.q() == 2 && series.argument < 0.0 && series.termination.is_none()
}

fn asymptotic(series: &HyperSeries) -> Option<EvalResult> {
    let (b1, b2) = (series.denominators[0], series.denominators[1]);
    asymptotic::hyp1f2_large_negative_sq(series.numerators[0], b1, b2, -series.argument)
}

fn alternative(series: &HyperSeries) -> Result<Option<EvalResult>> {
    if is_1f2_negative(series) {
        let x = (-series.argument).sqrt();
        return euler::hyp1f2_bessel(series.numerators[0], series.denominators[0], series.denominators[1], x);
    }
    euler::hyp3f2_legendre(series)
}

/// Evaluates a pFq series. Plain double sums are tried first and escalated
/// to log-domain (on overflow) and double-word (on cancellation) sums; past
/// the double-word budget, ₁F₂ at negative argument and ₃F₂ of Legendre
/// type switch to Euler-integral quadrature.
pub fn eval_pfq(series: &HyperSeries, pol: &SummationPolicy) -> Result<EvalResult> {
    if series.termination == Some(0) || series.argument == 0.0 {
        return Ok(EvalResult::exact(1.0, Method::PlainSum));
    }
    series.check_convergence()?;
    if let Some(method) = pol.force {
        return forced(series, pol, method);
    }
    if pol.alternative_routes && is_1f2_negative(series) && (-series.argument).sqrt() >= ASYMPTOTIC_FROM {
        if let Some(r) = asymptotic(series) {
            if within(pol, r.value, r.abs_error_estimate) {
                return Ok(r);
            }
        }
    }
    let plain = sum_plain(series, pol);
    if plain.finite() && plain.ratio() <= pol.escalate_ratio && within(pol, plain.value, plain.err) {
        return Ok(plain.into_result(Method::PlainSum));
    }
    let mut worst = plain.ratio();
    if !plain.finite() {
        let log = sum_log(series, pol);
        if log.finite() && log.ratio() <= pol.escalate_ratio && within(pol, log.value, log.err) {
            return Ok(log.into_result(Method::LogDomainSigned));
        }
        if log.value.is_infinite() && log.ratio() <= pol.escalate_ratio {
            return Err(Error::Domain("hypergeometric value overflows double precision".into()));
        }
        worst = log.ratio();
    }
    let dd = sum_dd(series, pol);
    if dd.finite() && dd.ratio() <= pol.exhausted_ratio && within(pol, dd.value, dd.err) {
        return Ok(dd.into_result(Method::ExtendedPrecision));
    }
    if dd.finite() {
        worst = dd.ratio();
    }
    if pol.alternative_routes {
        if let Some(r) = alternative(series)? {
            if r.is_finite() && within(pol, r.value, r.abs_error_estimate) {
                return Ok(r);
            }
            // Report the better of the two honest answers.
            if dd.finite() && r.is_finite() && r.abs_error_estimate < dd.err {
                return Ok(r);
            }
        }
    }
    if dd.finite() && dd.ratio() <= pol.exhausted_ratio && dd.err <= 1e-6 * dd.value.abs() {
        // Tolerance missed but still meaningful: hand back with its estimate.
        return Ok(dd.into_result(Method::ExtendedPrecision));
    }
    Err(Error::PrecisionExhausted { ratio: worst })
}

fn forced(series: &HyperSeries, pol: &SummationPolicy, method: Method) -> Result<EvalResult> {
    let out = match method {
        Method::PlainSum => sum_plain(series, pol),
        Method::LogDomainSigned => sum_log(series, pol),
        Method::ExtendedPrecision => sum_dd(series, pol),
        Method::Asymptotic => {
            if !is_1f2_negative(series) {
                return Err(Error::InvalidParameter("asymptotic route needs ₁F₂ at negative argument".into()));
            }
            return asymptotic(series)
                .ok_or_else(|| Error::InvalidParameter("asymptotic expansion unavailable".into()));
        }
        Method::Quadrature => {
            return alternative(series)?
                .ok_or_else(|| Error::InvalidParameter("no integral representation for this series".into()));
        }
    };
    if !out.finite() {
        return Err(Error::PrecisionExhausted { ratio: out.ratio() });
    }
    Ok(out.into_result(method))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(a: &[f64], b: &[f64], z: f64) -> EvalResult {
        eval_pfq(&HyperSeries::new(a, b, z).unwrap(), &SummationPolicy::default()).unwrap()
    }

    #[test]
    fn construction_rules() {
        assert!(HyperSeries::new(&[1.0], &[-2.0], 0.5).is_err());
        assert!(HyperSeries::new(&[1.0], &[1e-13], 0.5).is_err());
        let s = HyperSeries::new(&[-3.0 + 1e-13, -5.0], &[1.5], 0.3).unwrap();
        assert_eq!(s.termination_index(), Some(3));
        assert_eq!(s.numerators()[0], -3.0);
        assert!(!HyperSeries::new(&[-2.5], &[1.5], 0.3).unwrap().is_terminating());
    }

    #[test]
    fn trivial_values() {
        assert_eq!(eval(&[3.0], &[4.5, 5.0], 0.0).value, 1.0);
        assert_eq!(eval(&[0.0, 2.0, 3.5], &[1.5, 2.5], 0.7).value, 1.0);
        assert_eq!(eval(&[-0.0, 2.0, 3.5], &[1.5, 2.5], 1.0).value, 1.0);
    }

    #[test]
    fn elementary_closed_forms() {
        // ₀F₀(;;z) = e^z, ₁F₀(a;;z) = (1−z)^{−a}, ₂F₁(1,1;2;z) = −ln(1−z)/z
        let r = eval(&[], &[], -3.0);
        assert!((r.value - (-3f64).exp()).abs() < 1e-15);
        let r = eval(&[2.5], &[], 0.4);
        assert!((r.value - 0.6f64.powf(-2.5)).abs() < 1e-13);
        let r = eval(&[1.0, 1.0], &[2.0], 0.9);
        assert!((r.value + (0.1f64).ln() / 0.9).abs() < 1e-13);
    }

    #[test]
    fn large_negative_argument_routes() {
        // ₁F₂(1; 3/2, 2; −x²) = sin²x / x²
        for x in [30.0f64, 1000.0, 12345.6] {
            let r = eval(&[1.0], &[1.5, 2.0], -x * x);
            let want = (x.sin() / x).powi(2);
            assert!((r.value - want).abs() < 1e-12 * x.recip().powi(2), "x={x} {} {want}", r.value);
        }
    }

    #[test]
    fn gauss_sum_at_unit_argument() {
        // ₂F₁(a,b;c;1) = Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b))
        let (a, b, c) = (0.5, 0.75, 4.0);
        let want = libm::tgamma(c) * libm::tgamma(c - a - b) / (libm::tgamma(c - a) * libm::tgamma(c - b));
        let r = eval(&[a, b], &[c], 1.0);
        assert!(((r.value - want) / want).abs() < 1e-12, "{} vs {want}", r.value);
    }

    #[test]
    fn terminating_sums_exact_term_count() {
        let s = HyperSeries::new(&[-7.0, 2.5, 1.25], &[3.5, 4.0], 0.25).unwrap();
        let r = eval_pfq(&s, &SummationPolicy::default()).unwrap();
        assert_eq!(r.terms_or_nodes, 8);
    }

    #[test]
    fn divergence_detected() {
        let s = HyperSeries::new(&[1.0, 2.0], &[3.0], 1.5).unwrap();
        assert!(matches!(eval_pfq(&s, &SummationPolicy::default()), Err(Error::Divergent(_))));
        let s = HyperSeries::new(&[1.0, 2.0], &[2.5], 1.0).unwrap();
        assert!(matches!(eval_pfq(&s, &SummationPolicy::default()), Err(Error::Divergent(_))));
        let s = HyperSeries::new(&[1.0, 2.0, 1.0], &[2.5], 0.1).unwrap();
        assert!(eval_pfq(&s, &SummationPolicy::default()).is_err());
    }

    #[test]
    fn escalates_on_cancellation() {
        // ₁F₁(−30; 1; 15) = L₃₀(15) = −220.422071145817…
        let s = HyperSeries::new(&[-30.0], &[1.0], 15.0).unwrap();
        let r = eval_pfq(&s, &SummationPolicy::default()).unwrap();
        assert_eq!(r.method, Method::ExtendedPrecision);
        assert!(r.cancellation_ratio > 1e10);
        assert!((r.value + 220.422071145817).abs() < 1e-11);
        // ₁F₁(−60; 1; 30) cancels by ~1e23, beyond the double-word budget.
        let s = HyperSeries::new(&[-60.0], &[1.0], 30.0).unwrap();
        assert!(matches!(
            eval_pfq(&s, &SummationPolicy::default()),
            Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn overflow_is_an_error_not_infinity() {
        let s = HyperSeries::new(&[1.0], &[0.5], 800.0).unwrap();
        assert!(matches!(eval_pfq(&s, &SummationPolicy::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn log_domain_agrees_with_double_word() {
        let s = HyperSeries::new(&[-300.0, 40.0], &[1.5], -2.5).unwrap();
        let a = eval_pfq(&s, &SummationPolicy::forced(Method::LogDomainSigned)).unwrap();
        let b = eval_pfq(&s, &SummationPolicy::forced(Method::ExtendedPrecision)).unwrap();
        assert!(((a.value - b.value) / b.value).abs() < 1e-11);
    }

    #[test]
    fn deterministic() {
        let s = HyperSeries::new(&[2.25], &[3.5, 4.0], -90.0).unwrap();
        let a = eval_pfq(&s, &SummationPolicy::default()).unwrap();
        let b = eval_pfq(&s, &SummationPolicy::default()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
