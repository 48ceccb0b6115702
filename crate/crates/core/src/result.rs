use std::fmt;

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    PlainSum,
    LogDomainSigned,
    ExtendedPrecision,
    Quadrature,
    Asymptotic,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::PlainSum => "plain-sum",
            Method::LogDomainSigned => "log-domain-signed",
            Method::ExtendedPrecision => "extended-precision",
            Method::Quadrature => "quadrature",
            Method::Asymptotic => "asymptotic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Side conditions noticed while evaluating.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    /// Parameters lie outside the positive definite regime (μ < λ).
    pub outside_positivity: bool,
    /// Quadrature stopped at the rounding floor before meeting the tolerance.
    pub roundoff_limited: bool,
    /// An analytic tail correction was added.
    pub tail_corrected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub method: Method,
    pub terms_or_nodes: usize,
    /// Largest partial-sum magnitude over |value|; 1 when nothing cancels.
    pub cancellation_ratio: f64,
    pub flags: Flags,
}

impl EvalResult {
    pub fn new(value: f64, abs_error_estimate: f64, method: Method, terms_or_nodes: usize) -> Self {
        EvalResult {
            value,
            abs_error_estimate,
            method,
            terms_or_nodes,
            cancellation_ratio: 1.0,
            flags: Flags::default(),
        }
    }

    pub fn exact(value: f64, method: Method) -> Self {
        Self::new(value, 0.0, method, 1)
    }

    pub fn with_cancellation(mut self, ratio: f64) -> Self {
        self.cancellation_ratio = if ratio.is_finite() { ratio.max(1.0) } else { f64::MAX };
        self
    }

    /// Multiplies value and error by `k`.
    pub fn scaled(mut self, k: f64) -> Self {
        self.value *= k;
        self.abs_error_estimate *= k.abs();
        self
    }

    pub fn relative_error_estimate(&self) -> f64 {
        if self.value == 0.0 {
            self.abs_error_estimate
        } else {
            self.abs_error_estimate / self.value.abs()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.abs_error_estimate.is_finite()
    }
}

/// Cancellation ratio from a peak magnitude and the final value.
pub(crate) fn ratio_of(peak: f64, value: f64) -> f64 {
    if value == 0.0 {
        if peak == 0.0 {
            1.0
        } else {
            f64::MAX
        }
    } else {
        (peak / value.abs()).max(1.0)
    }
}
