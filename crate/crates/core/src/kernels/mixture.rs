use super::{IsotropicKernel, KernelError, KernelFamily};
use crate::montecarlo::TraitDistribution;
use crate::numerics::Density;
use serde::{Deserialize, Serialize};

/// Which scale quantity a mixing law is placed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixingTarget {
    /// Trait variance `sigma_x^2`, kernel length scale fixed.
    TraitVariance,
    /// Squared kernel length scale `l^2`, trait scale fixed.
    KernelLengthSquared,
    /// The squared roughness `r^2 = sigma_x^2 / l^2` directly.
    RoughnessSquared,
}

/// A mixing law on one scale quantity plus the fixed value of the other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleMixture {
    pub target: MixingTarget,
    pub law: Density,
    /// The fixed length scale for [`MixingTarget::TraitVariance`], the fixed
    /// trait scale for [`MixingTarget::KernelLengthSquared`], unused otherwise.
    #[serde(default = "one")]
    pub reference: f64,
}

fn one() -> f64 {
    1.0
}

impl ScaleMixture {
    pub fn over_roughness(law: Density) -> Self {
        Self {
            target: MixingTarget::RoughnessSquared,
            law,
            reference: 1.0,
        }
    }

    pub fn over_trait_variance(law: Density, l: f64) -> Self {
        Self {
            target: MixingTarget::TraitVariance,
            law,
            reference: l,
        }
    }

    pub fn over_kernel_length(law: Density, sigma_x: f64) -> Self {
        Self {
            target: MixingTarget::KernelLengthSquared,
            law,
            reference: sigma_x,
        }
    }

    /// The induced law of `r^2`.
    pub fn roughness_law(&self) -> Density {
        let c = self.reference * self.reference;
        match self.target {
            MixingTarget::RoughnessSquared => self.law,
            MixingTarget::TraitVariance => self.law.scaled(1.0 / c),
            MixingTarget::KernelLengthSquared => inverse(&self.law).scaled(c),
        }
    }
}

/// The law of `1 / V`.
fn inverse(d: &Density) -> Density {
    match *d {
        Density::PointMass { value } => Density::PointMass { value: 1.0 / value },
        Density::Exponential { rate } => Density::InverseGamma {
            shape: 1.0,
            scale: rate,
        },
        Density::Gamma { shape, rate } => Density::InverseGamma { shape, scale: rate },
        Density::InverseGamma { shape, scale } => normalize_gamma(shape, scale),
        Density::HalfCauchy { scale } => Density::HalfCauchy { scale: 1.0 / scale },
        Density::BetaPrime { alpha, beta, scale } => Density::BetaPrime {
            alpha: beta,
            beta: alpha,
            scale: 1.0 / scale,
        },
    }
}

fn normalize_gamma(shape: f64, rate: f64) -> Density {
    if shape == 1.0 {
        Density::Exponential { rate }
    } else {
        Density::Gamma { shape, rate }
    }
}

/// A positive factor `c`, `c G_a`, or `c / G_b` with `G` unit-rate gamma.
enum Factor {
    Fixed(f64),
    Gamma { shape: f64, scale: f64 },
    InvGamma { shape: f64, scale: f64 },
}

impl Factor {
    fn density(&self) -> Density {
        match *self {
            Factor::Fixed(c) => Density::PointMass { value: c },
            Factor::Gamma { shape, scale } => normalize_gamma(shape, 1.0 / scale),
            Factor::InvGamma { shape, scale } => Density::InverseGamma { shape, scale },
        }
    }
}

/// Scale-mixture-of-Gaussians form of a trait law, as the law of the trait
/// variance multiplier.
fn trait_factor(traits: &TraitDistribution) -> Result<Factor, KernelError> {
    match *traits {
        TraitDistribution::Gaussian { sigma_x } => Ok(Factor::Fixed(sigma_x * sigma_x)),
        TraitDistribution::Laplace { scale } => Ok(Factor::Gamma {
            shape: 1.0,
            scale: 2.0 * scale * scale,
        }),
        TraitDistribution::StudentT { df, scale } => Ok(Factor::InvGamma {
            shape: df / 2.0,
            scale: scale * scale * df / 2.0,
        }),
        TraitDistribution::GaussianAnisotropic { .. } => Err(KernelError::Unsupported(
            "mixture representations are defined for isotropic trait laws".into(),
        )),
    }
}

/// Mixture-of-squared-exponentials form of a kernel, as the law of the
/// precision multiplier `W` with `h(d) = E[exp(-W d^2 / (2 l^2))]`.
fn kernel_factor(kernel: &IsotropicKernel) -> Factor {
    match kernel.family() {
        KernelFamily::SquaredExponential => Factor::Fixed(1.0),
        KernelFamily::RationalQuadratic => {
            let alpha = kernel.shape().expect("validated");
            Factor::Gamma {
                shape: alpha,
                scale: 1.0 / alpha,
            }
        }
        KernelFamily::Matern => {
            let nu = kernel.shape().expect("validated");
            Factor::InvGamma {
                shape: nu,
                scale: nu,
            }
        }
        KernelFamily::Exponential => Factor::InvGamma {
            shape: 0.5,
            scale: 0.5,
        },
    }
}

/// Law of `r^2` for a trait law paired with a kernel, when both are Gaussian
/// scale mixtures and the product stays in a closed family.
///
/// The trait scale is shared by the whole population, so the result is the
/// mixing law over `r^2 = V W sigma^2 / l^2`.
pub fn mixture_rep(
    traits: &TraitDistribution,
    kernel: &IsotropicKernel,
) -> Result<ScaleMixture, KernelError> {
    let l2 = kernel.length_scale() * kernel.length_scale();
    let law = match (trait_factor(traits)?, kernel_factor(kernel)) {
        (Factor::Fixed(c), other) | (other, Factor::Fixed(c)) => other.density().scaled(c),
        (Factor::Gamma { shape: a, scale: s }, Factor::InvGamma { shape: b, scale: t })
        | (Factor::InvGamma { shape: b, scale: t }, Factor::Gamma { shape: a, scale: s }) => {
            Density::BetaPrime {
                alpha: a,
                beta: b,
                scale: s * t,
            }
        }
        _ => {
            return Err(KernelError::Unsupported(format!(
                "{traits:?} with a {:?} kernel has no closed mixing law",
                kernel.family()
            )))
        }
    };
    Ok(ScaleMixture::over_roughness(law.scaled(1.0 / l2)))
}
