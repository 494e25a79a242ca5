//! Routes to the shared-endpoint correlation `rho` and the flow variance `sigma2`.
//!
//! For traits `X, Y, W` drawn independently, `sigma2 = Var[f(X, Y)]` and
//! `rho = Cov[f(X, Y), f(X, W)] / sigma2`. Every route writes
//! `rho = N / D` with
//!
//! * `N = E[h(|[X - Y, Y - W]|)] - E[h(|[X - W, Y - X]|)]`, the shared-tail
//!   covariance term, and
//! * `D = 1 - E[h(sqrt(2) |X - Y|)]`, so that `sigma2 = 2 amplitude D`.
//!
//! `sigma2` in a [`CorrelationResult`] is per unit kernel amplitude unless the
//! route received a kernel.

mod chi2;
mod mixture;
mod model;
mod se;

pub use chi2::rho_sigma_chi2;
pub use mixture::{
    half_minus_rho_matern_lower_bound, rho_matern, rho_matern_lower_bound, rho_mixture,
    rho_mixture_anisotropic, rho_mixture_independent,
};
pub use model::{model_correlation, sigma2_flow};
pub use se::{half_minus_rho_se, rho_se_anisotropic, rho_se_isotropic, SMALL_ROUGHNESS};

use crate::kernels::KernelError;
use crate::numerics::{Estimate, NumericsError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("unsupported model: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Chi2Quadrature,
    MixtureQuadrature,
    MaternQuadrature,
    MaternLowerBound,
    MonteCarlo,
    Pade,
    LimitSmooth,
    LimitRough,
}

/// Which evaluation branch produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Direct,
    /// Second-order expansion used below [`SMALL_ROUGHNESS`].
    SmallRoughnessSeries,
    /// All roughness coefficients are zero; `rho = 1/2` by continuity.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub rho: f64,
    pub sigma2: f64,
    pub method: Method,
    /// Estimated absolute error of `rho`.
    pub error_estimate: f64,
    pub branch: Branch,
}

impl CorrelationResult {
    fn from_ratio(
        num: Estimate,
        den: Estimate,
        amplitude: f64,
        method: Method,
    ) -> Result<Self, CorrelationError> {
        if den.value.is_nan() || den.value <= 0.0 {
            return Err(CorrelationError::Domain(
                "flow variance vanishes, rho is undefined".into(),
            ));
        }
        let rho = num.value / den.value;
        let rel = num.error / num.value.abs().max(f64::MIN_POSITIVE) + den.error / den.value;
        Ok(Self {
            rho,
            sigma2: 2.0 * amplitude * den.value,
            method,
            error_estimate: rho.abs() * rel,
            branch: Branch::Direct,
        })
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<f64, CorrelationError> {
    if dim == 0 {
        return Err(CorrelationError::Domain(
            "trait dimension must be at least 1".into(),
        ));
    }
    Ok(dim as f64)
}

pub(crate) fn check_roughness(r: f64) -> Result<(), CorrelationError> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(CorrelationError::Domain(format!(
            "roughness must be finite and non-negative, got {r}"
        )));
    }
    Ok(())
}
