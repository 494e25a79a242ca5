//! Independent sampling estimators and Matérn sample paths.
//!
//! These are the oracles for the quadrature routes: they never use the
//! closed forms, only kernel evaluations and Gaussian draws.

mod estimate;
mod flow;
mod paths;
mod traits;

pub use estimate::{
    estimate_rho_sigma, BatchMeans, FlowModel, McEstimate, RhoSigmaEstimate, DEFAULT_BATCHES,
};
pub use flow::{flow_gram, sample_flow, FlowSample, Modulation};
pub use paths::{sample_matern_path_1d, sample_matern_zoom, PathLevel, ZoomSpec, MAX_GRID};
pub use traits::{
    sample_population, sample_traits, ScaleSharing, TraitDistribution, TraitModel, TraitSample,
};

use crate::kernels::KernelError;
use crate::numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
