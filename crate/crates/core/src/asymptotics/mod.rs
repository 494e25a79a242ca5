//! Smoothness and roughness limits of `rho` and two-point Padé approximants.

use crate::kernels::ScaleMixture;
use crate::numerics::{gamma, ln_gamma};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper edge of the smooth band: every smooth-branch coefficient must be at most this.
pub const SMOOTH_BAND: f64 = 0.25;
/// Lower edge of the rough band.
pub const ROUGH_BAND: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error(
        "roughness coefficient {value} at axis {axis} lies between the smooth and rough bands"
    )]
    Partition { axis: usize, value: f64 },
    #[error("mixture has an infinite moment: {0}")]
    InfiniteMoment(String),
}

/// Which end of the roughness axis an expansion describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitBranch {
    Smooth,
    Rough,
}

/// Smoothness regime of a Matérn kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeTag {
    NuBelow1,
    NuEqual1,
    /// `1 < nu <= 2`.
    Nu1To2,
    NuAbove2,
}

impl RegimeTag {
    pub fn classify(nu: f64) -> Result<Self, AsymptoticsError> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(AsymptoticsError::Domain(format!(
                "Matérn order must be positive, got {nu}"
            )));
        }
        Ok(if nu < 1.0 {
            RegimeTag::NuBelow1
        } else if nu == 1.0 {
            RegimeTag::NuEqual1
        } else if nu <= 2.0 {
            RegimeTag::Nu1To2
        } else {
            RegimeTag::NuAbove2
        })
    }
}

/// Split of the axes into smooth (`r_j <= 1/4`) and rough (`r_j >= 2`) sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub smooth: Vec<usize>,
    pub rough: Vec<usize>,
}

/// A limiting value together with the partition it was computed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitValue {
    pub rho: f64,
    pub branch: LimitBranch,
    pub partition: Partition,
}

fn partition(roughness: &[f64]) -> Result<Partition, AsymptoticsError> {
    if roughness.is_empty() {
        return Err(AsymptoticsError::Domain("no roughness coefficients".into()));
    }
    let mut p = Partition {
        smooth: Vec::new(),
        rough: Vec::new(),
    };
    for (axis, &value) in roughness.iter().enumerate() {
        if !(value.is_finite() && value >= 0.0) {
            return Err(AsymptoticsError::Domain(format!(
                "invalid roughness {value}"
            )));
        }
        if value <= SMOOTH_BAND {
            p.smooth.push(axis);
        } else if value >= ROUGH_BAND {
            p.rough.push(axis);
        } else {
            return Err(AsymptoticsError::Partition { axis, value });
        }
    }
    Ok(p)
}

/// Squared exponential limits for roughness coefficients `r_j`.
///
/// Smooth: `1/2 - ((T-1) av(r^2) - dis(r^2)) / 4`, with `av` the mean and
/// `dis` the variance-to-mean ratio of the squared coefficients. Needs every
/// `r_j <= 1/4`.
///
/// Rough: with `m` rough axes and geometric mean `g` of their coefficients,
/// `2^(-m/2) g^-m [1 - ((3/2)^(-m/2) - 4^(-m/2)) g^-m]`. Smooth axes only
/// contribute at higher order. Needs at least one `r_j >= 2` and none in
/// the middle band.
pub fn limit_se(roughness: &[f64], branch: LimitBranch) -> Result<LimitValue, AsymptoticsError> {
    let p = partition(roughness)?;
    let t = roughness.len() as f64;
    let rho = match branch {
        LimitBranch::Smooth => {
            if let Some(&axis) = p.rough.first() {
                return Err(AsymptoticsError::Partition {
                    axis,
                    value: roughness[axis],
                });
            }
            let sq: Vec<f64> = roughness.iter().map(|r| r * r).collect();
            let av = sq.iter().sum::<f64>() / t;
            let dis = if av > 0.0 {
                sq.iter().map(|s| (s - av) * (s - av)).sum::<f64>() / t / av
            } else {
                0.0
            };
            0.5 - 0.25 * ((t - 1.0) * av - dis)
        }
        LimitBranch::Rough => {
            if p.rough.is_empty() {
                return Err(AsymptoticsError::Domain(
                    "rough branch needs at least one r_j >= 2".into(),
                ));
            }
            let m = p.rough.len() as f64;
            let ln_g = p.rough.iter().map(|&j| roughness[j].ln()).sum::<f64>() / m;
            let g_m = (-m * ln_g).exp();
            2f64.powf(-m / 2.0) * g_m * (1.0 - (1.5f64.powf(-m / 2.0) - 4f64.powf(-m / 2.0)) * g_m)
        }
    };
    Ok(LimitValue {
        rho,
        branch,
        partition: p,
    })
}

/// Isotropic form of [`limit_se`].
pub fn limit_se_isotropic(
    r: f64,
    dim: usize,
    branch: LimitBranch,
) -> Result<f64, AsymptoticsError> {
    if dim == 0 {
        return Err(AsymptoticsError::Domain(
            "dimension must be at least 1".into(),
        ));
    }
    Ok(limit_se(&vec![r; dim], branch)?.rho)
}

/// Smooth limit of a squared exponential scale mixture,
/// `1/2 - (T-1)/4 E[r^4] / E[r^2]`.
pub fn limit_mixture_smooth(mixture: &ScaleMixture, dim: usize) -> Result<f64, AsymptoticsError> {
    if dim == 0 {
        return Err(AsymptoticsError::Domain(
            "dimension must be at least 1".into(),
        ));
    }
    let law = mixture.roughness_law();
    let m1 = law
        .raw_moment(1.0)
        .ok_or_else(|| AsymptoticsError::InfiniteMoment(format!("E[r^2] diverges for {law:?}")))?;
    let m2 = law.raw_moment(2.0).ok_or_else(|| {
        AsymptoticsError::InfiniteMoment(format!(
            "E[r^4] diverges for {law:?}; the correction is not O(r^2), use quadrature"
        ))
    })?;
    Ok(0.5 - 0.25 * (dim as f64 - 1.0) * m2 / m1)
}

/// Coefficient `c` in the Matérn roughness limit `rho ~ c (sqrt(2) r)^-T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoughCoefficient {
    /// `Γ(nu + T/2) / (Γ(nu) nu^(T/2))`, the limit of the mixture integral.
    /// Defined for every `nu > 0`.
    #[default]
    Exact,
    /// `Γ(nu) / (Γ(nu - T/2) (nu - T/2)^(T/2))`, the published closed form.
    /// It agrees with `Exact` at `T = 2` only and needs `nu > T/2`.
    Published,
}

impl RoughCoefficient {
    pub fn value(self, nu: f64, dim: usize) -> Result<f64, AsymptoticsError> {
        RegimeTag::classify(nu)?;
        let h = dim as f64 / 2.0;
        match self {
            RoughCoefficient::Exact => Ok((ln_gamma(nu + h) - ln_gamma(nu) - h * nu.ln()).exp()),
            RoughCoefficient::Published => {
                if nu <= h {
                    return Err(AsymptoticsError::Domain(format!(
                        "published roughness coefficient needs nu > T/2, got nu = {nu}, T = {dim}"
                    )));
                }
                Ok((ln_gamma(nu) - ln_gamma(nu - h) - h * (nu - h).ln()).exp())
            }
        }
    }
}

fn check_r(r: f64) -> Result<(), AsymptoticsError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(AsymptoticsError::Domain(format!(
            "roughness must be positive, got {r}"
        )));
    }
    Ok(())
}

/// Smooth-limit correction `S` for a Matérn kernel: the asymptote is
/// `C (1 - S)` and the Padé approximant uses `C (1 + S + R)^-1`.
fn matern_smooth_terms(r: f64, nu: f64, dim: usize) -> Result<(f64, f64), AsymptoticsError> {
    let t = dim as f64;
    Ok(match RegimeTag::classify(nu)? {
        RegimeTag::NuBelow1 => {
            let c = 1.0 - 2f64.powf(-nu);
            let s = (2f64.powf(1.0 - nu) - 1.0) / (2f64.powf(nu) - 1.0)
                * gamma(nu)
                * (2.0 * nu).powf(1.0 - nu)
                * r.powf(2.0 * (1.0 - nu));
            (c, s)
        }
        RegimeTag::NuEqual1 => (0.5, 0.5 / r.log2().abs()),
        RegimeTag::Nu1To2 => {
            let s = (2.0 * nu).powf(nu - 1.0) / gamma(nu)
                * (2f64.powf(nu - 1.0) - 1.0)
                * (nu * (t - 2.0) + 2.0)
                / t
                * r.powf(2.0 * (nu - 1.0));
            (0.5, s)
        }
        RegimeTag::NuAbove2 => (0.5, 0.5 * (t - 1.0) * nu / (nu - 2.0) * r * r),
    })
}

/// Matérn limits.
///
/// Smooth: the regime-specific expansion, which for `nu <= 2` describes the
/// lower bound `rho~` and for `nu > 2` describes `rho` itself.
/// Rough: `c (sqrt(2) r)^-T` with `c` from `coefficient`.
pub fn limit_matern(
    r: f64,
    nu: f64,
    dim: usize,
    branch: LimitBranch,
    coefficient: RoughCoefficient,
) -> Result<f64, AsymptoticsError> {
    check_r(r)?;
    if dim == 0 {
        return Err(AsymptoticsError::Domain(
            "dimension must be at least 1".into(),
        ));
    }
    match branch {
        LimitBranch::Smooth => {
            let (c, s) = matern_smooth_terms(r, nu, dim)?;
            Ok(c * (1.0 - s))
        }
        LimitBranch::Rough => {
            let c = coefficient.value(nu, dim)?;
            Ok(c * (2f64.sqrt() * r).powf(-(dim as f64)))
        }
    }
}

/// Which two-point Padé approximant to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PadeModel {
    SquaredExponential,
    Matern {
        nu: f64,
        #[serde(default)]
        coefficient: PadeConvention,
    },
}

/// How the rough term of the Matérn approximant is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PadeConvention {
    /// `R = C 2^(T/2) r^T / c` with `c` the exact roughness coefficient, so
    /// that `C / R` reproduces [`limit_matern`] at large `r`.
    #[default]
    Matched,
    /// The published rough term `2^(T/2-1) G r^T` (or
    /// `2^(nu+T/2) / (2^nu + 1) G r^T` below `nu = 1`) with
    /// `G = Γ(nu) / (Γ(nu - T/2) (nu - T/2)^(T/2))`. Needs `nu > T/2`.
    Published,
}

/// Two-point Padé approximant `C (1 + S(r) + R(r))^-1`.
///
/// For the squared exponential kernel `C = 1/2`, `S = (T-1) r^2 / 2` and
/// `R = (sqrt(2) r)^T / 2`. For the Matérn kernel `C` and `S` follow the
/// smooth regime of `nu` (with `nu = 2` in the `(1, 2]` branch).
///
/// At `nu = 1` the smooth term `|log2 r|^-1 / 2` is singular at `r = 1`, so
/// that branch is not monotone across `r = 1`.
pub fn pade(model: &PadeModel, r: f64, dim: usize) -> Result<f64, AsymptoticsError> {
    if dim == 0 {
        return Err(AsymptoticsError::Domain(
            "dimension must be at least 1".into(),
        ));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(AsymptoticsError::Domain(format!(
            "roughness must be non-negative, got {r}"
        )));
    }
    let t = dim as f64;
    match *model {
        PadeModel::SquaredExponential => {
            Ok(0.5 / (1.0 + 0.5 * (t - 1.0) * r * r + 0.5 * (2f64.sqrt() * r).powf(t)))
        }
        PadeModel::Matern { nu, coefficient } => {
            let regime = RegimeTag::classify(nu)?;
            if r == 0.0 {
                return Ok(if regime == RegimeTag::NuBelow1 {
                    1.0 - 2f64.powf(-nu)
                } else {
                    0.5
                });
            }
            let (c, s) = matern_smooth_terms(r, nu, dim)?;
            let rough = match coefficient {
                PadeConvention::Matched => {
                    let k = RoughCoefficient::Exact.value(nu, dim)?;
                    c * (2f64.sqrt() * r).powf(t) / k
                }
                PadeConvention::Published => {
                    let g = RoughCoefficient::Published.value(nu, dim)?;
                    let lead = if regime == RegimeTag::NuBelow1 {
                        2f64.powf(nu + t / 2.0) / (2f64.powf(nu) + 1.0)
                    } else {
                        2f64.powf(t / 2.0 - 1.0)
                    };
                    lead * g * r.powf(t)
                }
            };
            Ok(c / (1.0 + s + rough))
        }
    }
}
