use super::{
    rho_mixture, rho_se_anisotropic, rho_se_isotropic, CorrelationError, CorrelationResult,
};
use crate::kernels::{
    mixture_rep, roughness_coefficients, IsotropicKernel, KernelFamily, RoughnessSpec,
};
use crate::montecarlo::{ScaleSharing, TraitDistribution, TraitModel};
use crate::numerics::QuadratureSpec;
use nalgebra::DMatrix;

/// `rho` and `sigma2` for a kernel, a trait model and a trait dimension,
/// picking the most accurate available route.
///
/// * Gaussian traits with a squared exponential kernel use the closed forms.
/// * Other isotropic pairs use the mixture route when the pair has a closed
///   mixing law (see [`crate::kernels::mixture_rep`]).
/// * Anisotropic Gaussian traits are supported for the squared exponential
///   kernel only.
pub fn model_correlation(
    kernel: &IsotropicKernel,
    traits: &TraitModel,
    dim: usize,
    spec: &QuadratureSpec,
) -> Result<CorrelationResult, CorrelationError> {
    traits
        .distribution
        .validate(dim)
        .map_err(|e| CorrelationError::Domain(e.to_string()))?;
    let amp = kernel.amplitude();
    let l = kernel.length_scale();
    let scaled = |mut res: CorrelationResult| {
        res.sigma2 *= amp;
        res
    };
    match &traits.distribution {
        TraitDistribution::Gaussian { sigma_x }
            if kernel.family() == KernelFamily::SquaredExponential =>
        {
            Ok(scaled(rho_se_isotropic(sigma_x / l, dim)?))
        }
        TraitDistribution::GaussianAnisotropic { cov } => {
            if kernel.family() != KernelFamily::SquaredExponential {
                return Err(CorrelationError::Unsupported(
                    "anisotropic traits are supported for the squared exponential kernel only"
                        .into(),
                ));
            }
            let sx = DMatrix::from_fn(dim, dim, |i, j| cov[i][j]);
            let spec_r = RoughnessSpec::new(sx, DMatrix::identity(dim, dim) * (l * l))?;
            Ok(scaled(rho_se_anisotropic(&roughness_coefficients(
                &spec_r,
            )?)?))
        }
        TraitDistribution::Gaussian { sigma_x } if *sigma_x == 0.0 => Err(
            CorrelationError::Domain("sigma_x is zero, flow variance vanishes".into()),
        ),
        dist => {
            if traits.sharing == ScaleSharing::Vertex
                && !matches!(dist, TraitDistribution::Gaussian { .. })
            {
                return Err(CorrelationError::Unsupported(
                    "per-vertex mixing variances have no mixture formula; use Monte Carlo".into(),
                ));
            }
            let mixture = mixture_rep(dist, kernel)?;
            Ok(scaled(rho_mixture(&mixture, dim, spec)?))
        }
    }
}

/// Flow variance `sigma2 = Var[f(X, Y)]`.
///
/// Vanishing trait scale gives exactly zero.
pub fn sigma2_flow(
    kernel: &IsotropicKernel,
    traits: &TraitModel,
    dim: usize,
    spec: &QuadratureSpec,
) -> Result<f64, CorrelationError> {
    if let TraitDistribution::Gaussian { sigma_x } = traits.distribution {
        if sigma_x == 0.0 {
            return Ok(0.0);
        }
    }
    Ok(model_correlation(kernel, traits, dim, spec)?.sigma2)
}
