//! Double-word ("double-double") arithmetic: an unevaluated sum hi + lo
//! carrying roughly 106 bits of significand.

use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Unit roundoff of double-word arithmetic.
pub const DD_EPS: f64 = 4.930380657631324e-32;

const LN2: DoubleWord = DoubleWord { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleWord {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleWord {
    pub const ZERO: DoubleWord = DoubleWord { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleWord = DoubleWord { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn new(x: f64) -> Self {
        DoubleWord { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = self.lo.mul_add(b, e);
        let (hi, lo) = fast_two_sum(p, e);
        DoubleWord { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = fast_two_sum(s, e + self.lo);
        DoubleWord { hi, lo }
    }

    pub fn recip(self) -> Self {
        DoubleWord::ONE / self
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        DoubleWord { hi, lo }
    }

    /// Square root by one Newton correction of the double result.
    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleWord::new(self.hi.sqrt());
        }
        let y = self.hi.sqrt();
        let r = self - DoubleWord::prod(y, y);
        DoubleWord::new(y).add_f64(r.hi / (2.0 * y))
    }

    /// e^x: reduction by ln 2 and 2^10, Taylor sum for e^r − 1, then squaring.
    pub fn exp(self) -> Self {
        if !self.hi.is_finite() || self.hi.abs() > 700.0 {
            return DoubleWord::new(self.hi.exp());
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).mul_f64(1.0 / 1024.0);
        // a = e^r − 1 keeps its relative accuracy through (1+a)² − 1 = a(a+2)
        let mut acc = DoubleWord::ONE;
        for j in (2..=12).rev() {
            acc = DoubleWord::ONE + r * acc / DoubleWord::new(j as f64);
        }
        let mut a = r * acc;
        for _ in 0..10 {
            a = a * a.add_f64(2.0);
        }
        a.add_f64(1.0).mul_f64(2f64.powi(k as i32))
    }

    /// Natural logarithm by one Newton step on exp.
    pub fn ln(self) -> Self {
        let y = self.hi.ln();
        if !y.is_finite() {
            return DoubleWord::new(y);
        }
        let y = DoubleWord::new(y);
        y + self * (-y).exp() - DoubleWord::ONE
    }

    /// x^p for x > 0; multiples of 1/2 go through powi and sqrt.
    pub fn powf(self, p: f64) -> Self {
        let twice = 2.0 * p;
        if twice == twice.round() && twice.abs() < 1e6 {
            let n = p.floor();
            let whole = self.powi(n.abs() as u32);
            let whole = if n < 0.0 { whole.recip() } else { whole };
            if p != n {
                return whole * self.sqrt();
            }
            return whole;
        }
        (self.ln().mul_f64(p)).exp()
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: u32) -> Self {
        let mut base = self;
        let mut acc = DoubleWord::ONE;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

impl From<f64> for DoubleWord {
    fn from(x: f64) -> Self {
        DoubleWord::new(x)
    }
}

impl Neg for DoubleWord {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleWord { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleWord {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = fast_two_sum(s, e + t);
        let (hi, lo) = fast_two_sum(s, e + f);
        DoubleWord { hi, lo }
    }
}

impl Sub for DoubleWord {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleWord {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = fast_two_sum(p, e);
        DoubleWord { hi, lo }
    }
}

impl Div for DoubleWord {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = fast_two_sum(q1, q2);
        DoubleWord { hi, lo }.add_f64(q3)
    }
}

impl AddAssign for DoubleWord {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl SubAssign for DoubleWord {
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl MulAssign for DoubleWord {
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}

impl PartialOrd for DoubleWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}
