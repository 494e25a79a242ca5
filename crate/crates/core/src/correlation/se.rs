use super::{check_dim, check_roughness, Branch, CorrelationError, CorrelationResult, Method};

/// Below this roughness the closed forms switch to their series expansion.
pub const SMALL_ROUGHNESS: f64 = 1e-6;

/// `(1 + y)^(-a) - 1`.
pub(crate) fn pow_m1(y: f64, a: f64) -> f64 {
    (-a * y.ln_1p()).exp_m1()
}

/// Numerator and denominator integrands for a squared exponential kernel at
/// squared roughness `x` in `t` dimensions:
/// `N = (1+2x)^(-t/2) - ((1+x)(1+3x))^(-t/2)`, `D = 1 - (1+4x)^(-t/2)`.
pub(crate) fn se_terms(x: f64, t: f64) -> (f64, f64) {
    let a = 0.5 * t;
    let ln2 = -a * (2.0 * x).ln_1p();
    let lnp = -a * (x.ln_1p() + (3.0 * x).ln_1p());
    (diff_exp(ln2, lnp), -pow_m1(4.0 * x, a))
}

/// `e^a - e^b` with full relative accuracy when `a - b` is accurate.
pub(crate) fn diff_exp(a: f64, b: f64) -> f64 {
    b.exp() * (a - b).exp_m1()
}

/// `D - 2N` for [`se_terms`], the numerator of `1/2 - rho` times `2D`.
///
/// With `u1 = a ln(1+4x)`, `u2 = a ln(1+2x)` and `u3 = a ln((1+x)(1+3x))`
/// this is `e^-u1 (e^(u1-u3) - 1) + (1 - e^-u2)^2 + e^-2u2 (e^(2u2-u3) - 1)`,
/// where every bracket is formed from an accurate small argument.
pub(crate) fn se_half_gap(x: f64, t: f64) -> f64 {
    let a = 0.5 * t;
    let u1 = a * (4.0 * x).ln_1p();
    let u2 = a * (2.0 * x).ln_1p();
    let d13 = a * (-3.0 * x * x / ((1.0 + x) * (1.0 + 3.0 * x))).ln_1p();
    let d23 = a * (x * x / ((1.0 + x) * (1.0 + 3.0 * x))).ln_1p();
    (-u1).exp() * d13.exp_m1() + (-u2).exp_m1().powi(2) + (-2.0 * u2).exp() * d23.exp_m1()
}

/// `rho` for Gaussian traits `N(0, sigma_x^2 I_T)` and a squared exponential
/// kernel with length scale `l`, as a function of `r = sigma_x / l`.
///
/// Below [`SMALL_ROUGHNESS`] the value is `(1 - (T-1) r^2 / 2) / 2`.
pub fn rho_se_isotropic(r: f64, dim: usize) -> Result<CorrelationResult, CorrelationError> {
    check_roughness(r)?;
    let t = check_dim(dim)?;
    let x = r * r;
    if r < SMALL_ROUGHNESS {
        return Ok(CorrelationResult {
            rho: 0.5 * (1.0 - 0.5 * (t - 1.0) * x),
            sigma2: 4.0 * t * x,
            method: Method::ClosedForm,
            error_estimate: t * t * x * x,
            branch: Branch::SmallRoughnessSeries,
        });
    }
    let (num, den) = se_terms(x, t);
    Ok(CorrelationResult {
        rho: num / den,
        sigma2: 2.0 * den,
        method: Method::ClosedForm,
        error_estimate: 4.0 * f64::EPSILON * (num / den).abs(),
        branch: Branch::Direct,
    })
}

/// `1/2 - rho` for the isotropic squared exponential model, evaluated
/// without cancellation.
pub fn half_minus_rho_se(r: f64, dim: usize) -> Result<f64, CorrelationError> {
    check_roughness(r)?;
    let t = check_dim(dim)?;
    let x = r * r;
    if r == 0.0 {
        return Ok(0.0);
    }
    let (_, den) = se_terms(x, t);
    Ok(se_half_gap(x, t) / (2.0 * den))
}

/// `rho` for Gaussian traits and a squared exponential kernel with general
/// covariances, given the roughness coefficients `r_j` (one per axis).
///
/// All-zero coefficients return the continuous limit `1/2` flagged as
/// [`Branch::Degenerate`].
pub fn rho_se_anisotropic(roughness: &[f64]) -> Result<CorrelationResult, CorrelationError> {
    let t = check_dim(roughness.len())?;
    for &r in roughness {
        check_roughness(r)?;
    }
    let max_r = roughness.iter().cloned().fold(0.0, f64::max);
    if max_r == 0.0 {
        return Ok(CorrelationResult {
            rho: 0.5,
            sigma2: 0.0,
            method: Method::ClosedForm,
            error_estimate: 0.0,
            branch: Branch::Degenerate,
        });
    }
    let sq: Vec<f64> = roughness.iter().map(|r| r * r).collect();
    if max_r < SMALL_ROUGHNESS {
        let av = sq.iter().sum::<f64>() / t;
        let var = sq.iter().map(|s| (s - av) * (s - av)).sum::<f64>() / t;
        let dis = var / av;
        return Ok(CorrelationResult {
            rho: 0.5 - 0.25 * ((t - 1.0) * av - dis),
            sigma2: 4.0 * t * av,
            method: Method::ClosedForm,
            error_estimate: t * t * av * av,
            branch: Branch::SmallRoughnessSeries,
        });
    }
    let a: f64 = -0.5 * sq.iter().map(|x| (2.0 * x).ln_1p()).sum::<f64>();
    let b: f64 = -0.5
        * sq.iter()
            .map(|x| x.ln_1p() + (3.0 * x).ln_1p())
            .sum::<f64>();
    let c: f64 = -0.5 * sq.iter().map(|x| (4.0 * x).ln_1p()).sum::<f64>();
    let num = diff_exp(a, b);
    let den = -c.exp_m1();
    Ok(CorrelationResult {
        rho: num / den,
        sigma2: 2.0 * den,
        method: Method::ClosedForm,
        error_estimate: 4.0 * t * f64::EPSILON * (num / den).abs(),
        branch: Branch::Direct,
    })
}
