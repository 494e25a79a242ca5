use super::{check_dim, CorrelationError, CorrelationResult, Method};
use crate::kernels::IsotropicKernel;
use crate::numerics::{expect_1d_with_breaks, Density, QuadratureSpec};

/// Multiple of `eps / (1 - h)` used as the relative tolerance floor.
const NOISE_FACTOR: f64 = 256.0;

/// `rho` and `sigma2` for Gaussian traits `N(0, sigma_x^2 I_T)` and any
/// isotropic kernel, by integrating over independent chi-squared variables.
///
/// With `S1, S2 ~ chi2(T)`:
/// `N = E[h(sigma_x sqrt(2 S1))] - E[h(sigma_x sqrt(S1 + 3 S2))]` and
/// `D = 1 - E[h(sigma_x sqrt(4 S1))]`.
///
/// Some profiles evaluate `1 - h` by subtraction, which leaves a relative
/// noise of about `eps / (1 - h)` at the typical distance. The relative
/// tolerance is raised to that floor, so small `sigma_x / l` converges to
/// the accuracy the integrand supports.
pub fn rho_sigma_chi2(
    kernel: &IsotropicKernel,
    sigma_x: f64,
    dim: usize,
    spec: &QuadratureSpec,
) -> Result<CorrelationResult, CorrelationError> {
    let t = check_dim(dim)?;
    if !(sigma_x.is_finite() && sigma_x > 0.0) {
        return Err(CorrelationError::Domain(format!(
            "sigma_x must be positive, got {sigma_x}"
        )));
    }
    let chi2 = Density::Gamma {
        shape: 0.5 * t,
        rate: 0.5,
    };
    let l = kernel.length_scale();
    let breaks = [l * l / (sigma_x * sigma_x)];
    let gap = |s: f64| kernel.one_minus_h(sigma_x * s.sqrt()).unwrap_or(f64::NAN);
    let typical = gap(t);
    let spec = &QuadratureSpec {
        rel_tol: spec.rel_tol.max(NOISE_FACTOR * f64::EPSILON / typical),
        ..*spec
    };
    let inner = spec.tightened(16.0);

    let failure = std::cell::RefCell::new(None);
    let num = expect_1d_with_breaks(
        &chi2,
        |s1| {
            let inner_val = expect_1d_with_breaks(&chi2, |s2| gap(s1 + 3.0 * s2), &inner, &breaks);
            match inner_val {
                Ok(e) => e.value - gap(2.0 * s1),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        },
        &spec.tightened(4.0),
        &breaks,
    );
    let num = match (failure.into_inner(), num) {
        (Some(e), _) => return Err(e.into()),
        (None, r) => r?,
    };
    let den = expect_1d_with_breaks(&chi2, |s| gap(4.0 * s), &spec.tightened(4.0), &breaks)?;
    CorrelationResult::from_ratio(num, den, kernel.amplitude(), Method::Chi2Quadrature)
}
