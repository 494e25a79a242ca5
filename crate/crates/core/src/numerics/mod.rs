//! Numerical building blocks shared by every other module.

mod bessel;
mod expect;
mod linalg;
mod quadrature;
mod rng;

pub use bessel::{bessel_k, ln_bessel_k};
pub use expect::{expect_1d, expect_1d_with_breaks, Density};
pub use linalg::{cholesky_psd, eig_sym, CholeskyFactor, JITTER_LADDER};
pub use quadrature::{integrate, integrate_to_infinity};
pub use rng::RngStream;

use thiserror::Error;

/// Failures raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("result overflows f64 ({0})")]
    Overflow(String),
    #[error("result underflows f64 ({0})")]
    Underflow(String),
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    NoConvergence { estimate: f64, error: f64 },
    #[error("matrix is not positive semidefinite even with jitter {max_jitter:e}")]
    NotPsd { max_jitter: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Tolerances and budget for adaptive quadrature.
///
/// An integral is accepted once the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)` or below the accumulated round-off floor.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-300,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self, NumericsError> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(NumericsError::Domain(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(NumericsError::Domain(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// A tighter copy used for inner integrals of nested expectations.
    pub(crate) fn tightened(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol / factor,
            rel_tol: (self.rel_tol / factor).max(1e-15),
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// A quadrature value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `Γ(x)`.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}
