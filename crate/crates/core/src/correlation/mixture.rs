use super::se::{diff_exp, pow_m1, se_terms};
use super::{check_dim, check_roughness, CorrelationError, CorrelationResult, Method};
use crate::kernels::ScaleMixture;
use crate::numerics::{expect_1d_with_breaks, Density, Estimate, QuadratureSpec};

fn ratio_over_law(
    law: &Density,
    t: f64,
    spec: &QuadratureSpec,
    method: Method,
) -> Result<CorrelationResult, CorrelationError> {
    let breaks = [1.0];
    let inner = spec.tightened(4.0);
    let num = expect_1d_with_breaks(law, |y| se_terms(y, t).0, &inner, &breaks)?;
    let den = expect_1d_with_breaks(law, |y| se_terms(y, t).1, &inner, &breaks)?;
    CorrelationResult::from_ratio(num, den, 1.0, method)
}

/// `rho` for a scale mixture of squared exponential models: the closed-form
/// numerator and denominator averaged over the induced law of `r^2`.
///
/// A point mass reproduces [`super::rho_se_isotropic`].
pub fn rho_mixture(
    mixture: &ScaleMixture,
    dim: usize,
    spec: &QuadratureSpec,
) -> Result<CorrelationResult, CorrelationError> {
    let t = check_dim(dim)?;
    let law = mixture.roughness_law();
    law.validate()?;
    ratio_over_law(&law, t, spec, Method::MixtureQuadrature)
}

/// Anisotropic mixture with squared roughness `r_j^2 V` on axis `j` for a
/// single mixing variable `V`.
///
/// A point mass at `1` reproduces [`super::rho_se_anisotropic`].
pub fn rho_mixture_anisotropic(
    roughness: &[f64],
    law: &Density,
    spec: &QuadratureSpec,
) -> Result<CorrelationResult, CorrelationError> {
    check_dim(roughness.len())?;
    for &r in roughness {
        check_roughness(r)?;
    }
    law.validate()?;
    let squared: Vec<f64> = roughness.iter().map(|r| r * r).collect();
    let terms = |v: f64| {
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for &cj in &squared {
            let x = cj * v;
            a -= 0.5 * (2.0 * x).ln_1p();
            b -= 0.5 * (x.ln_1p() + (3.0 * x).ln_1p());
            c -= 0.5 * (4.0 * x).ln_1p();
        }
        (diff_exp(a, b), -f64::exp_m1(c))
    };
    let scale = squared.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(CorrelationError::Domain(
            "all roughness coefficients are zero".into(),
        ));
    }
    let breaks = [1.0 / scale];
    let inner = spec.tightened(4.0);
    let num = expect_1d_with_breaks(law, |v| terms(v).0, &inner, &breaks)?;
    let den = expect_1d_with_breaks(law, |v| terms(v).1, &inner, &breaks)?;
    CorrelationResult::from_ratio(num, den, 1.0, Method::MixtureQuadrature)
}

/// Anisotropic mixture with independent laws for each `r_j^2`.
pub fn rho_mixture_independent(
    laws: &[Density],
    spec: &QuadratureSpec,
) -> Result<CorrelationResult, CorrelationError> {
    check_dim(laws.len())?;
    let inner = spec.tightened(4.0);
    let (mut pa, mut pb, mut pc) = (1.0, 1.0, 1.0);
    let mut rel_err = 0.0;
    for law in laws {
        law.validate()?;
        let ea = expect_1d_with_breaks(law, |x| (-0.5 * (2.0 * x).ln_1p()).exp(), &inner, &[1.0])?;
        let eb = expect_1d_with_breaks(
            law,
            |x| (-0.5 * (x.ln_1p() + (3.0 * x).ln_1p())).exp(),
            &inner,
            &[1.0],
        )?;
        let ec = expect_1d_with_breaks(law, |x| (-0.5 * (4.0 * x).ln_1p()).exp(), &inner, &[1.0])?;
        pa *= ea.value;
        pb *= eb.value;
        pc *= ec.value;
        rel_err += ea.error / ea.value + eb.error / eb.value + ec.error / ec.value;
    }
    let num = Estimate {
        value: pa - pb,
        error: rel_err * pa,
    };
    let den = Estimate {
        value: 1.0 - pc,
        error: rel_err * pc,
    };
    CorrelationResult::from_ratio(num, den, 1.0, Method::MixtureQuadrature)
}

fn matern_law(nu: f64, r: f64) -> Result<Density, CorrelationError> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(CorrelationError::Domain(format!(
            "Matérn order must be positive, got {nu}"
        )));
    }
    check_roughness(r)?;
    if r == 0.0 {
        return Err(CorrelationError::Domain(
            "roughness is zero, flow variance vanishes".into(),
        ));
    }
    // r^2 V with V ~ InvGamma(nu, nu)
    Ok(Density::InverseGamma {
        shape: nu,
        scale: nu * r * r,
    })
}

/// `rho` for Gaussian traits and a Matérn kernel of order `nu`, through the
/// inverse-gamma mixture of squared exponential kernels.
pub fn rho_matern(
    nu: f64,
    r: f64,
    dim: usize,
    spec: &QuadratureSpec,
) -> Result<CorrelationResult, CorrelationError> {
    let t = check_dim(dim)?;
    let law = matern_law(nu, r)?;
    ratio_over_law(&law, t, spec, Method::MaternQuadrature)
}

/// The lower bound `rho~ = 1 - J(r) / J(sqrt(2) r)` with
/// `J(r) = E[1 - (1 + r^2 V)^(-T/2)]`, `V ~ InvGamma(nu, nu)`.
pub fn rho_matern_lower_bound(
    nu: f64,
    r: f64,
    dim: usize,
    spec: &QuadratureSpec,
) -> Result<CorrelationResult, CorrelationError> {
    let t = check_dim(dim)?;
    let law = matern_law(nu, r)?;
    let a = 0.5 * t;
    let inner = spec.tightened(4.0);
    let num = expect_1d_with_breaks(
        &law,
        |y| diff_exp(-a * (2.0 * y).ln_1p(), -a * (4.0 * y).ln_1p()),
        &inner,
        &[1.0],
    )?;
    let den = expect_1d_with_breaks(&law, |y| -pow_m1(4.0 * y, a), &inner, &[1.0])?;
    CorrelationResult::from_ratio(num, den, 1.0, Method::MaternLowerBound)
}

/// `1 - 2 (1+z)^(-a) + (1+2z)^(-a)`, with its power series near zero.
fn lower_bound_gap(z: f64, a: f64) -> f64 {
    if z < 0.05 {
        let mut coef = 1.0;
        let mut pow = 1.0;
        let mut two_k = 1.0;
        let mut sum = 0.0;
        for k in 1..60 {
            let kf = k as f64;
            coef *= (-a - kf + 1.0) / kf;
            pow *= z;
            two_k *= 2.0;
            if k >= 2 {
                let term = coef * (two_k - 2.0) * pow;
                sum += term;
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
            }
        }
        sum
    } else {
        -2.0 * pow_m1(z, a) + pow_m1(2.0 * z, a)
    }
}

/// `1/2 - rho~` without cancellation, for small-roughness analysis.
pub fn half_minus_rho_matern_lower_bound(
    nu: f64,
    r: f64,
    dim: usize,
    spec: &QuadratureSpec,
) -> Result<f64, CorrelationError> {
    let t = check_dim(dim)?;
    let law = matern_law(nu, r)?;
    let a = 0.5 * t;
    let inner = spec.tightened(4.0);
    let gap = expect_1d_with_breaks(&law, |y| lower_bound_gap(2.0 * y, a), &inner, &[1.0])?;
    let den = expect_1d_with_breaks(&law, |y| -pow_m1(4.0 * y, a), &inner, &[1.0])?;
    Ok(gap.value / (2.0 * den.value))
}
