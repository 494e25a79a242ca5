use super::KernelError;
use crate::numerics::{ln_bessel_k, ln_gamma};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Radial profile families. `h(0) = 1` for all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    #[serde(alias = "se")]
    SquaredExponential,
    Exponential,
    Matern,
    #[serde(alias = "rq")]
    RationalQuadratic,
}

/// `kappa(d) = amplitude * h(d / l)` with an optional shape parameter
/// (Matérn `nu`, rational quadratic `alpha`).
///
/// Serialized as `{"family", "l", "shape", "amplitude"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelJson", into = "KernelJson")]
pub struct IsotropicKernel {
    family: KernelFamily,
    length_scale: f64,
    shape: Option<f64>,
    amplitude: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelJson {
    family: KernelFamily,
    l: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shape: Option<f64>,
    #[serde(default = "unit")]
    amplitude: f64,
}

fn unit() -> f64 {
    1.0
}

impl TryFrom<KernelJson> for IsotropicKernel {
    type Error = KernelError;
    fn try_from(j: KernelJson) -> Result<Self, KernelError> {
        IsotropicKernel::new(j.family, j.l, j.shape, j.amplitude)
    }
}

impl From<IsotropicKernel> for KernelJson {
    fn from(k: IsotropicKernel) -> Self {
        KernelJson {
            family: k.family,
            l: k.length_scale,
            shape: k.shape,
            amplitude: k.amplitude,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64, KernelError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(KernelError::Parameter(format!(
            "{name} must be finite and positive, got {v}"
        )))
    }
}

impl IsotropicKernel {
    pub fn new(
        family: KernelFamily,
        l: f64,
        shape: Option<f64>,
        amplitude: f64,
    ) -> Result<Self, KernelError> {
        positive("length scale", l)?;
        positive("amplitude", amplitude)?;
        let shape = match family {
            KernelFamily::Matern | KernelFamily::RationalQuadratic => {
                let s = shape.ok_or_else(|| {
                    KernelError::Parameter(format!("{family:?} needs a shape parameter"))
                })?;
                Some(positive("shape", s)?)
            }
            _ => None,
        };
        Ok(Self {
            family,
            length_scale: l,
            shape,
            amplitude,
        })
    }

    pub fn squared_exponential(l: f64) -> Result<Self, KernelError> {
        Self::new(KernelFamily::SquaredExponential, l, None, 1.0)
    }

    pub fn exponential(l: f64) -> Result<Self, KernelError> {
        Self::new(KernelFamily::Exponential, l, None, 1.0)
    }

    pub fn matern(nu: f64, l: f64) -> Result<Self, KernelError> {
        Self::new(KernelFamily::Matern, l, Some(nu), 1.0)
    }

    pub fn rational_quadratic(alpha: f64, l: f64) -> Result<Self, KernelError> {
        Self::new(KernelFamily::RationalQuadratic, l, Some(alpha), 1.0)
    }

    pub fn with_amplitude(self, amplitude: f64) -> Result<Self, KernelError> {
        Self::new(self.family, self.length_scale, self.shape, amplitude)
    }

    pub fn with_length_scale(self, l: f64) -> Result<Self, KernelError> {
        Self::new(self.family, l, self.shape, self.amplitude)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn shape(&self) -> Option<f64> {
        self.shape
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Normalized profile `h(d)`, equal to 1 at `d = 0`.
    pub fn eval_h(&self, d: f64) -> Result<f64, KernelError> {
        let s = self.scaled_distance(d)?;
        Ok(match self.family {
            KernelFamily::SquaredExponential => (-0.5 * s * s).exp(),
            KernelFamily::Exponential => (-s).exp(),
            KernelFamily::RationalQuadratic => {
                let alpha = self.shape.expect("validated");
                (-alpha * (s * s / (2.0 * alpha)).ln_1p()).exp()
            }
            KernelFamily::Matern => matern_h(self.shape.expect("validated"), s)?,
        })
    }

    /// `1 - h(d)`, accurate when `h(d)` is close to 1.
    pub fn one_minus_h(&self, d: f64) -> Result<f64, KernelError> {
        let s = self.scaled_distance(d)?;
        Ok(match self.family {
            KernelFamily::SquaredExponential => -(-0.5 * s * s).exp_m1(),
            KernelFamily::Exponential => -(-s).exp_m1(),
            KernelFamily::RationalQuadratic => {
                let alpha = self.shape.expect("validated");
                -(-alpha * (s * s / (2.0 * alpha)).ln_1p()).exp_m1()
            }
            KernelFamily::Matern => 1.0 - matern_h(self.shape.expect("validated"), s)?,
        })
    }

    /// `amplitude * h(d)`.
    pub fn covariance(&self, d: f64) -> Result<f64, KernelError> {
        Ok(self.amplitude * self.eval_h(d)?)
    }

    fn scaled_distance(&self, d: f64) -> Result<f64, KernelError> {
        if !(d.is_finite() && d >= 0.0) {
            return Err(KernelError::Parameter(format!(
                "distance must be finite and non-negative, got {d}"
            )));
        }
        Ok(d / self.length_scale)
    }
}

/// Matérn profile at scaled distance `s = d / l`.
fn matern_h(nu: f64, s: f64) -> Result<f64, KernelError> {
    if s < 1e-12 {
        return Ok(1.0);
    }
    let z = (2.0 * nu).sqrt() * s;
    if nu == 0.5 {
        return Ok((-z).exp());
    }
    if nu == 1.5 {
        return Ok((1.0 + z) * (-z).exp());
    }
    if nu == 2.5 {
        return Ok((1.0 + z + z * z / 3.0) * (-z).exp());
    }
    let ln_h =
        (1.0 - nu) * std::f64::consts::LN_2 - ln_gamma(nu) + nu * z.ln() + ln_bessel_k(nu, z)?;
    Ok(ln_h.exp().min(1.0))
}

/// Spectral density of the unit-amplitude Matérn kernel in `d` dimensions,
/// using the transform convention `∫ kappa(tau) exp(-2 pi i zeta.tau) dtau`.
pub fn matern_psd(zeta: &[f64], nu: f64, l: f64, d: usize) -> Result<f64, KernelError> {
    positive("nu", nu)?;
    positive("length scale", l)?;
    if d == 0 || zeta.len() != d {
        return Err(KernelError::Parameter(format!(
            "frequency has {} components, dimension is {d}",
            zeta.len()
        )));
    }
    let half_d = d as f64 / 2.0;
    let norm2: f64 = zeta.iter().map(|z| z * z).sum();
    let ln_psd = ln_gamma(nu + half_d) - ln_gamma(nu)
        + d as f64 * std::f64::consts::LN_2
        + half_d * PI.ln()
        + half_d * (l * l / (2.0 * nu)).ln()
        - (nu + half_d) * (l * l * 4.0 * PI * PI * norm2 / (2.0 * nu)).ln_1p();
    Ok(ln_psd.exp())
}
