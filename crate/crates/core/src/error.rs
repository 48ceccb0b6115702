use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma pole at x = {0}")]
    Pole(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("precision exhausted (cancellation ratio {ratio:e})")]
    PrecisionExhausted { ratio: f64 },
    #[error("subdivision limit reached: value {value:e}, error estimate {error:e}")]
    SubdivisionLimit { value: f64, error: f64 },
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFiniteIntegrand(f64),
    #[error("oscillatory cycle sums did not shrink over {0} consecutive cycles")]
    NonDecayingEnvelope(usize),
    #[error("closed form requires integer parameters")]
    NonIntegerParameter,
    #[error("non-positive Fourier transform {value:e} at z = {z}")]
    NonPositiveTransform { z: f64, value: f64 },
    #[error("non-positive Schoenberg coefficient {value:e} at m = {m}")]
    NonPositiveCoefficient { m: usize, value: f64 },
    #[error("operation requires odd dimension")]
    EvenDimensionUnsupported,
    #[error("outside domain: {0}")]
    Domain(String),
}
