//! The generalized Wendland function
//! φ(r) = (2^{α−1}Γ(α))^{−1} ∫_{εr}^1 (1−t)^μ t (t² − (εr)²)^{α−1} dt.

use crate::error::{Error, Result};
use crate::hypernum::{gamma, log_gamma, DoubleWord};
use crate::quadrature::{gauss_jacobi_dd, integrate, GaussRuleDd, QuadratureConfig};
use crate::result::{EvalResult, Method};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WendlandParams {
    mu: f64,
    alpha: f64,
    epsilon: f64,
    d: usize,
}

impl WendlandParams {
    pub fn new(mu: f64, alpha: f64, epsilon: f64, d: usize) -> Result<Self> {
        if !(mu > -1.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("μ = {mu} must exceed −1")));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("α = {alpha} must be positive")));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!("ε = {epsilon} must be positive")));
        }
        if d < 1 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        Ok(WendlandParams { mu, alpha, epsilon, d })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// λ = (d+1)/2 + α
    pub fn lambda(&self) -> f64 {
        (self.d as f64 + 1.0) / 2.0 + self.alpha
    }

    /// Positive definite on ℝ^d exactly when μ ≥ λ.
    pub fn pd_euclidean(&self) -> bool {
        self.mu >= self.lambda()
    }

    pub fn support_radius(&self) -> f64 {
        1.0 / self.epsilon
    }

    pub fn sphere_ok(&self) -> bool {
        self.d >= 2 && self.epsilon >= 0.5
    }

    pub fn require_sphere(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Domain("sphere operations need d ≥ 2".into()));
        }
        if self.epsilon < 0.5 {
            return Err(Error::Domain(format!("ε = {} < 1/2 leaves the cap radius undefined", self.epsilon)));
        }
        Ok(())
    }

    pub fn with_d(&self, d: usize) -> Result<Self> {
        Self::new(self.mu, self.alpha, self.epsilon, d)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.mu, self.alpha, epsilon, self.d)
    }
}

/// (1 − εr)_+^μ
pub fn truncated_power(r: f64, params: &WendlandParams) -> f64 {
    let s = params.epsilon * r;
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - s).powf(params.mu)
    }
}

/// φ(0) = Γ(2α)Γ(μ+1) / (Γ(2α+μ+1) 2^{α−1} Γ(α)).
pub fn value_at_origin(params: &WendlandParams) -> f64 {
    let (a, m) = (params.alpha, params.mu);
    let l = log_gamma(2.0 * a).unwrap().0 + log_gamma(m + 1.0).unwrap().0
        - log_gamma(2.0 * a + m + 1.0).unwrap().0
        - (a - 1.0) * 2f64.ln()
        - log_gamma(a).unwrap().0;
    l.exp()
}

/// φ(r) by quadrature. With t = s + v² the integrand becomes
/// 2 (1−s−v²)^μ (s+v²) v^{2α−1} (2s+v²)^{α−1} on [0, √(1−s)], which is
/// bounded at the lower end for α ≥ 1/2 and integrable otherwise.
pub fn eval(r: f64, params: &WendlandParams, cfg: &QuadratureConfig) -> Result<EvalResult> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("r = {r} must be nonnegative")));
    }
    let s = params.epsilon * r;
    if s >= 1.0 {
        return Ok(EvalResult::exact(0.0, Method::Quadrature));
    }
    let (mu, alpha) = (params.mu, params.alpha);
    let big_v = (1.0 - s).sqrt();
    let norm = 1.0 / (2f64.powf(alpha - 1.0) * gamma(alpha)?);
    let integrand = |v: f64| {
        let edge = (big_v - v) * (big_v + v);
        let v2 = v * v;
        if s == 0.0 {
            return 2.0 * edge.powf(mu) * v.powf(4.0 * alpha - 1.0);
        }
        let mut g = 2.0 * edge.powf(mu) * (s + v2);
        if alpha != 1.0 {
            g *= v.powf(2.0 * alpha - 1.0) * (2.0 * s + v2).powf(alpha - 1.0);
        } else {
            g *= v;
        }
        g
    };
    let out = integrate(integrand, 0.0, big_v, cfg)?;
    Ok(out.scaled(norm))
}

/// Exact polynomial form of φ in s = εr for integer μ ≥ 0 and α ≥ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    /// c₀..c_N with φ = Σ c_k s^k on [0, 1].
    pub coefficients: Vec<BigRational>,
    pub float_coefficients: Vec<f64>,
    pub epsilon: f64,
    /// φ = (1−s)^{edge_order} q(s); q is kept for accurate evaluation near s = 1.
    pub edge_order: usize,
    pub edge_quotient: Vec<BigRational>,
    quotient_f64: Vec<f64>,
    quotient_dd: Vec<DoubleWord>,
}

impl PiecewisePolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Value at distance r (zero beyond the support).
    pub fn evaluate(&self, r: f64) -> f64 {
        self.evaluate_s(self.epsilon * r)
    }

    pub fn evaluate_s(&self, s: f64) -> f64 {
        if s >= 1.0 {
            return 0.0;
        }
        (1.0 - s).powi(self.edge_order as i32) * horner(&self.quotient_f64, s)
    }

    /// evaluate_s carried out in double-word arithmetic.
    pub fn evaluate_s_dd(&self, s: DoubleWord) -> DoubleWord {
        if s.hi >= 1.0 {
            return DoubleWord::ZERO;
        }
        let q = self.quotient_dd.iter().rev().fold(DoubleWord::ZERO, |acc, &ck| acc * s + ck);
        (DoubleWord::ONE - s).powi(self.edge_order as u32) * q
    }

    /// Σ c_k s^k from the expanded coefficients.
    pub fn evaluate_expanded(&self, s: f64) -> f64 {
        if s >= 1.0 {
            return 0.0;
        }
        horner(&self.float_coefficients, s)
    }

    pub fn exact_at(&self, s: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coefficients.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }
}

fn rational_to_dd(r: &BigRational) -> DoubleWord {
    let hi = r.to_f64().unwrap_or(f64::NAN);
    let lo = BigRational::from_float(hi).map(|h| (r - h).to_f64().unwrap_or(0.0)).unwrap_or(0.0);
    DoubleWord { hi, lo }
}

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * s + ck)
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut b = BigInt::one();
    for j in 0..k {
        b = b * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    b
}

fn as_nonneg_int(x: f64) -> Option<u64> {
    (x >= 0.0 && x == x.round() && x < 1e6).then_some(x as u64)
}

pub fn polynomial_closed_form(params: &WendlandParams) -> Result<PiecewisePolynomial> {
    let (Some(mu), Some(alpha)) = (as_nonneg_int(params.mu), as_nonneg_int(params.alpha)) else {
        return Err(Error::NonIntegerParameter);
    };
    if alpha == 0 {
        return Err(Error::NonIntegerParameter);
    }
    let n = (mu + 2 * alpha) as usize;
    let mut c = vec![BigRational::zero(); n + 1];
    // 1/(2^{α−1}(α−1)!)
    let mut norm_den = BigInt::one() << (alpha - 1) as usize;
    for j in 1..alpha {
        norm_den *= BigInt::from(j);
    }
    let norm = BigRational::new(BigInt::one(), norm_den);
    for i in 0..alpha {
        let outer_pow = (2 * (alpha - 1 - i)) as usize;
        let sign_i = if (alpha - 1 - i) % 2 == 0 { 1 } else { -1 };
        for k in 0..=mu {
            let sign = if k % 2 == 0 { sign_i } else { -sign_i };
            let e = 2 * i + k + 1;
            let x = BigRational::from_integer(binomial(alpha - 1, i) * binomial(mu, k) * BigInt::from(sign))
                * &norm
                / BigRational::from_integer(BigInt::from(e + 1));
            // ∫_s^1 t^e dt = (1 − s^{e+1})/(e+1)
            c[outer_pow] += &x;
            c[outer_pow + e as usize + 1] -= &x;
        }
    }
    let edge_order = (mu + alpha) as usize;
    let mut q = c.clone();
    for _ in 0..edge_order {
        q = divide_by_one_minus_s(&q)?;
    }
    let to_f64 = |v: &Vec<BigRational>| v.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>();
    Ok(PiecewisePolynomial {
        float_coefficients: to_f64(&c),
        quotient_f64: to_f64(&q),
        quotient_dd: q.iter().map(rational_to_dd).collect(),
        coefficients: c,
        epsilon: params.epsilon,
        edge_order,
        edge_quotient: q,
    })
}

/// Exact division by (1 − s); fails if s = 1 is not a root.
fn divide_by_one_minus_s(c: &[BigRational]) -> Result<Vec<BigRational>> {
    let n = c.len() - 1;
    let mut q = vec![BigRational::zero(); n];
    // c(s) = (s − 1) q(s) + rem
    let mut carry = BigRational::zero();
    for j in (1..=n).rev() {
        carry = &c[j] + &carry;
        q[j - 1] = carry.clone();
    }
    let rem = &c[0] + &carry;
    if !rem.is_zero() {
        return Err(Error::InvalidParameter(format!("polynomial does not vanish at s = 1 (remainder {rem})")));
    }
    Ok(q.into_iter().map(|v| -v).collect())
}

/// Fixed Gauss rules for φ when no polynomial form exists. With
/// t = s + (1−s)u,
/// φ = c (1−s)^{μ+α} ∫₀¹ (1−u)^μ u^{α−1} (s+(1−s)u) (2s+(1−s)u)^{α−1} du.
/// The last factor has a branch point at u = −2s/(1−s), so [0, 1/2] is cut
/// geometrically towards 0 and every piece sees that point at least one
/// piece length away. Nodes and weights are double-word accurate, so the
/// jumps where the piece count changes stay far below double rounding.
#[derive(Debug, Clone)]
struct GradedRule {
    head: GaussRuleDd,
    middle: GaussRuleDd,
    tail: GaussRuleDd,
    norm: f64,
    small_s: f64,
}

const GRADED_NODES: usize = 16;

impl GradedRule {
    fn new(params: &WendlandParams) -> Result<Self> {
        let (mu, alpha) = (params.mu, params.alpha);
        Ok(GradedRule {
            head: gauss_jacobi_dd(GRADED_NODES, alpha - 1.0, 0.0)?,
            middle: gauss_jacobi_dd(GRADED_NODES, 0.0, 0.0)?,
            tail: gauss_jacobi_dd(GRADED_NODES, 0.0, mu)?,
            norm: 1.0 / (2f64.powf(alpha - 1.0) * gamma(alpha)?),
            small_s: 1e-34f64.powf(1.0 / (2.0f64).min(2.0 * alpha + 1.0)),
        })
    }

    fn value(&self, s: DoubleWord, params: &WendlandParams) -> DoubleWord {
        if s.hi >= 1.0 {
            return DoubleWord::ZERO;
        }
        if s.hi < self.small_s {
            return DoubleWord::new(value_at_origin(params));
        }
        let (mu, alpha) = (params.mu, params.alpha);
        let one = DoubleWord::ONE;
        let h = one - s;
        let two_s = s.mul_f64(2.0);
        let g = |u: DoubleWord| {
            let hu = h * u;
            (s + hu) * (two_s + hu).powf(alpha - 1.0)
        };
        let c = two_s / h;
        let split = DoubleWord::new(0.5);
        let mut total = DoubleWord::ZERO;
        // [split, 1] against (1−u)^μ
        let mut acc = DoubleWord::ZERO;
        for (&y, &wt) in self.tail.nodes.iter().zip(&self.tail.weights) {
            let u = split + y.mul_f64(0.5);
            acc += u.powf(alpha - 1.0) * g(u) * wt;
        }
        total += acc * DoubleWord::new(0.5).powf(mu + 1.0) / DoubleWord::new(mu + 1.0);
        // [0, head] against u^{α−1}
        let head = if c < split { c } else { split };
        let mut acc = DoubleWord::ZERO;
        for (&y, &wt) in self.head.nodes.iter().zip(&self.head.weights) {
            let u = head * y;
            acc += (one - u).powf(mu) * g(u) * wt;
        }
        total += acc * head.powf(alpha) / DoubleWord::new(alpha);
        // geometric pieces in between
        let mut a = head;
        while a < split {
            let b = if a.mul_f64(2.0) < split { a.mul_f64(2.0) } else { split };
            let len = b - a;
            let mut acc = DoubleWord::ZERO;
            for (&y, &wt) in self.middle.nodes.iter().zip(&self.middle.weights) {
                let u = a + len * y;
                acc += (one - u).powf(mu) * u.powf(alpha - 1.0) * g(u) * wt;
            }
            total += acc * len;
            a = b;
        }
        h.powf(mu + alpha) * total.mul_f64(self.norm)
    }
}

/// φ evaluator for repeated use: exact polynomial when available,
/// fixed graded Gauss rules in double-word arithmetic otherwise.
#[derive(Debug, Clone)]
pub struct WendlandFunction {
    params: WendlandParams,
    poly: Option<PiecewisePolynomial>,
    graded: Option<GradedRule>,
}

impl WendlandFunction {
    pub fn new(params: &WendlandParams) -> Self {
        let poly = polynomial_closed_form(params).ok();
        let graded = if poly.is_none() { GradedRule::new(params).ok() } else { None };
        WendlandFunction { params: *params, poly, graded }
    }

    pub fn params(&self) -> &WendlandParams {
        &self.params
    }

    pub fn has_polynomial(&self) -> bool {
        self.poly.is_some()
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::InvalidParameter(format!("r = {r} must be nonnegative")));
        }
        match (&self.poly, &self.graded) {
            (Some(p), _) => Ok(p.evaluate(r)),
            _ => Ok(self.value_s_dd(DoubleWord::prod(self.params.epsilon, r))?.to_f64()),
        }
    }

    /// φ at s = εr given as a double-word, evaluated in double-word
    /// arithmetic.
    pub fn value_s_dd(&self, s: DoubleWord) -> Result<DoubleWord> {
        if !(s.hi >= 0.0) {
            return Err(Error::InvalidParameter(format!("s = {} must be nonnegative", s.hi)));
        }
        match (&self.poly, &self.graded) {
            (Some(p), _) => Ok(p.evaluate_s_dd(s)),
            (None, Some(g)) => Ok(g.value(s, &self.params)),
            (None, None) => {
                let cfg = QuadratureConfig::with_tolerances(1e-15, 1e-300);
                Ok(DoubleWord::new(eval(s.to_f64() / self.params.epsilon, &self.params, &cfg)?.value))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(mu: f64, alpha: f64, eps: f64, d: usize) -> WendlandParams {
        WendlandParams::new(mu, alpha, eps, d).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::with_tolerances(1e-14, 1e-300)
    }

    #[test]
    fn params_validation() {
        assert!(WendlandParams::new(-1.0, 1.0, 1.0, 3).is_err());
        assert!(WendlandParams::new(2.0, 0.0, 1.0, 3).is_err());
        assert!(WendlandParams::new(2.0, 1.0, 0.0, 3).is_err());
        assert!(WendlandParams::new(2.0, 1.0, 1.0, 0).is_err());
        let w = p(3.0, 1.0, 1.0, 3);
        assert_eq!(w.lambda(), 3.0);
        assert!(w.pd_euclidean());
        assert!(!p(2.9, 1.0, 1.0, 3).pd_euclidean());
        assert!(p(3.0, 1.0, 0.4, 3).require_sphere().is_err());
        assert!(p(3.0, 1.0, 0.5, 1).require_sphere().is_err());
    }

    #[test]
    fn truncated_power_values() {
        let w = p(2.0, 1.0, 1.0, 3);
        assert_eq!(truncated_power(0.0, &w), 1.0);
        assert_eq!(truncated_power(1.0, &w), 0.0);
        assert_eq!(truncated_power(0.5, &w), 0.25);
    }

    #[test]
    fn origin_beta_integral() {
        for (mu, alpha) in [(4.0, 1.0), (2.5, 0.5), (3.3, 1.5), (6.0, 2.0), (1.0, 0.3)] {
            let w = p(mu, alpha, 1.0, 3);
            let want = gamma(2.0 * alpha).unwrap() * gamma(mu + 1.0).unwrap()
                / (gamma(2.0 * alpha + mu + 1.0).unwrap() * 2f64.powf(alpha - 1.0) * gamma(alpha).unwrap());
            let got = eval(0.0, &w, &cfg()).unwrap().value;
            assert!(((got - want) / want).abs() < 1e-13, "mu={mu} alpha={alpha}");
            assert!(((value_at_origin(&w) - want) / want).abs() < 1e-13);
        }
    }

    #[test]
    fn linear_case_antiderivative() {
        let w = p(1.0, 1.0, 1.0, 3);
        for s in [0.0, 0.1, 0.37, 0.8, 0.99] {
            let want = 1.0 / 6.0 - s * s / 2.0 + s * s * s / 3.0;
            assert!((eval(s, &w, &cfg()).unwrap().value - want).abs() < 1e-15);
        }
    }

    #[test]
    fn support() {
        let w = p(3.0, 0.5, 2.0, 2);
        assert_eq!(eval(0.5, &w, &cfg()).unwrap().value, 0.0);
        assert_eq!(eval(7.0, &w, &cfg()).unwrap().value, 0.0);
        assert!(eval(0.4999, &w, &cfg()).unwrap().value < 1e-12);
    }

    #[test]
    fn closed_form_linear() {
        let poly = polynomial_closed_form(&p(1.0, 1.0, 1.0, 3)).unwrap();
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(poly.coefficients, vec![r(1, 6), r(0, 1), r(-1, 2), r(1, 3)]);
        assert_eq!(poly.degree(), 3);
    }

    #[test]
    fn closed_form_vanishes_at_edge() {
        let poly = polynomial_closed_form(&p(4.0, 2.0, 1.0, 3)).unwrap();
        assert!(poly.exact_at(&BigRational::one()).is_zero());
        assert_eq!(poly.evaluate_s(1.0), 0.0);
        assert_eq!(poly.degree(), 8);
        assert_eq!(poly.edge_order, 6);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let w = p(4.0, 1.0, 1.0, 3);
        let poly = polynomial_closed_form(&w).unwrap();
        let a = poly.evaluate(0.3);
        let b = eval(0.3, &w, &cfg()).unwrap().value;
        assert!(((a - b) / b).abs() < 1e-12);
        assert!(((poly.evaluate_expanded(0.3) - b) / b).abs() < 1e-12);
    }

    #[test]
    fn non_integer_rejected() {
        assert_eq!(polynomial_closed_form(&p(3.5, 1.0, 1.0, 3)), Err(Error::NonIntegerParameter));
        assert_eq!(polynomial_closed_form(&p(3.0, 0.5, 1.0, 3)), Err(Error::NonIntegerParameter));
    }

    #[test]
    fn small_alpha_singularity() {
        // α = 1/4: compare against a direct t-integral with its own singular handling.
        let w = p(2.0, 0.25, 1.0, 2);
        let s = 0.3f64;
        let direct = integrate(
            |u: f64| (1.0 - s - u).powi(2) * (s + u) * (u * (u + 2.0 * s)).powf(-0.75),
            0.0,
            1.0 - s,
            &cfg(),
        )
        .unwrap()
        .value
            / (2f64.powf(-0.75) * gamma(0.25).unwrap());
        let got = eval(s, &w, &cfg()).unwrap().value;
        assert!(((got - direct) / direct).abs() < 1e-9, "{got} {direct}");
    }

    #[test]
    fn graded_rule_matches_quadrature() {
        for w in [p(4.5, 1.5, 0.5, 5), p(2.0, 0.25, 1.0, 2), p(3.5, 2.5, 1.0, 3), p(3.0, 1.5, 0.7, 2)] {
            let f = WendlandFunction::new(&w);
            assert!(!f.has_polynomial());
            for r in [0.0, 1e-9, 1e-4, 0.01, 0.3, 0.9, 1.4, 1.9] {
                let r = r / w.epsilon();
                let want = eval(r, &w, &cfg()).unwrap().value;
                let got = f.value(r).unwrap();
                assert!((got - want).abs() <= 1e-13 * value_at_origin(&w), "{r} {got} {want}");
            }
        }
    }

    #[test]
    fn double_word_polynomial_is_exact_to_working_precision() {
        let poly = polynomial_closed_form(&p(5.0, 2.0, 1.0, 3)).unwrap();
        for s in [0.1, 0.37, 0.8, 0.99] {
            let exact = poly.exact_at(&BigRational::from_float(s).unwrap());
            let got = poly.evaluate_s_dd(DoubleWord::new(s));
            let diff = (exact - rational_to_dd_exact(got)).to_f64().unwrap();
            assert!(diff.abs() <= 1e-29 * got.hi.abs(), "{s} {diff}");
        }
    }

    fn rational_to_dd_exact(x: DoubleWord) -> BigRational {
        BigRational::from_float(x.hi).unwrap() + BigRational::from_float(x.lo).unwrap()
    }
}
