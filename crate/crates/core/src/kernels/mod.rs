//! Isotropic base kernels and the structures derived from them.

mod base;
mod mixture;
mod product;
mod roughness;

pub use base::{matern_psd, IsotropicKernel, KernelFamily};
pub use mixture::{mixture_rep, MixingTarget, ScaleMixture};
pub use product::{flow_kernel, ProductKernel};
pub use roughness::{roughness_coefficients, RoughnessSpec};

use crate::numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("invalid kernel parameter: {0}")]
    Parameter(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
