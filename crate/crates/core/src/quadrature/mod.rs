//! Adaptive quadrature: Gauss–Kronrod on finite intervals, cycle-by-cycle
//! integration of oscillatory tails, and Gauss–Jacobi rules.

mod gauss_jacobi;
mod gauss_kronrod;
mod oscillatory;

pub use gauss_jacobi::{gauss_jacobi, gauss_jacobi_dd, GaussRule, GaussRuleDd};
pub use gauss_kronrod::{integrate, integrate_with_breaks, integrate_with_noise};
pub use oscillatory::{integrate_oscillatory, integrate_oscillatory_to, power_tail_bound};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Cap on interval count (finite rules) and on cycle count (oscillatory rules).
    pub max_subdivisions: usize,
    pub osc_cycle_tol: f64,
    /// Envelope exponent p of an oscillatory integrand, |f| ≲ A x^{−p}.
    pub tail_exponent_hint: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
            osc_cycle_tol: 1e-12,
            tail_exponent_hint: 2.0,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureConfig { rel_tol, abs_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.rel_tol) || !ok(self.abs_tol) || !ok(self.osc_cycle_tol) {
            return Err(Error::InvalidParameter("tolerances must be positive and finite".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidParameter("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}
