//! Special functions: Γ, Pochhammer symbols, generalized hypergeometric
//! series, Bessel J and Gegenbauer polynomials.

mod asymptotic;
mod bessel;
pub mod dd;
pub(crate) mod euler;
mod gamma;
mod gegenbauer;
mod pfq;
mod pochhammer;

pub use asymptotic::hyp1f2_large_negative;
pub use bessel::{bessel_j, bessel_j_scaled};
pub use dd::DoubleWord;
pub use euler::{hyp1f2_bessel, legendre_3f2_ladder};
pub use gamma::{gamma, gamma_ratio, log_gamma, rgamma};
pub use gegenbauer::{gegenbauer, gegenbauer_normalized, gegenbauer_normalized_all};
pub use pfq::{eval_pfq, HyperSeries, SummationPolicy};
pub use pochhammer::{pochhammer, pochhammer_dd, pochhammer_log};
