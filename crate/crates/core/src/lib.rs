//! Generalized Wendland functions: direct evaluation, closed-form Fourier
//! transforms on ℝ^d, Schoenberg coefficients on S^{d−1}, and independent
//! quadrature oracles for all of them.

pub mod cli;
pub mod error;
pub mod fourier;
pub mod hypernum;
pub mod quadrature;
pub mod result;
pub mod schoenberg;
pub mod wendland;

pub use error::{Error, Result};
pub use result::{EvalResult, Flags, Method};
pub use wendland::WendlandParams;
