use super::KernelError;
use crate::numerics::eig_sym;
use nalgebra::DMatrix;

/// Trait covariance `Σ_x` and kernel length-scale matrix `Σ_u`.
#[derive(Debug, Clone)]
pub struct RoughnessSpec {
    pub trait_cov: DMatrix<f64>,
    pub kernel_cov: DMatrix<f64>,
}

impl RoughnessSpec {
    pub fn new(trait_cov: DMatrix<f64>, kernel_cov: DMatrix<f64>) -> Result<Self, KernelError> {
        let t = trait_cov.nrows();
        if t == 0 || !trait_cov.is_square() || kernel_cov.shape() != (t, t) {
            return Err(KernelError::Parameter(
                "covariances must be square with equal dimension".into(),
            ));
        }
        Ok(Self {
            trait_cov,
            kernel_cov,
        })
    }

    /// `Σ_x = sigma_x^2 I`, `Σ_u = l^2 I`.
    pub fn isotropic(sigma_x: f64, l: f64, dim: usize) -> Result<Self, KernelError> {
        Self::new(
            DMatrix::identity(dim, dim) * (sigma_x * sigma_x),
            DMatrix::identity(dim, dim) * (l * l),
        )
    }

    /// Diagonal covariances with per-axis trait scales and length scales.
    pub fn diagonal(sigma_x: &[f64], l: &[f64]) -> Result<Self, KernelError> {
        if sigma_x.len() != l.len() {
            return Err(KernelError::Parameter("axis counts differ".into()));
        }
        let sx: Vec<f64> = sigma_x.iter().map(|s| s * s).collect();
        let sl: Vec<f64> = l.iter().map(|s| s * s).collect();
        Self::new(
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sx)),
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sl)),
        )
    }

    pub fn dim(&self) -> usize {
        self.trait_cov.nrows()
    }

    /// Lower Cholesky factor `L` of `Σ_u`; distances whiten with `L^-1`.
    pub fn kernel_factor(&self) -> Result<DMatrix<f64>, KernelError> {
        nalgebra::Cholesky::new(self.kernel_cov.clone())
            .map(|c| c.l())
            .ok_or_else(|| {
                KernelError::Parameter("kernel length-scale matrix is not positive definite".into())
            })
    }
}

/// Roughness coefficients `r_j`, the square roots of the eigenvalues of
/// `Σ_u^{-1/2} Σ_x Σ_u^{-1/2}`, in descending order.
pub fn roughness_coefficients(spec: &RoughnessSpec) -> Result<Vec<f64>, KernelError> {
    let l = spec.kernel_factor()?;
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| KernelError::Parameter("kernel length-scale matrix is singular".into()))?;
    let mut m = &l_inv * &spec.trait_cov * l_inv.transpose();
    // symmetrize away round-off before the eigen solve
    m = (&m + m.transpose()) * 0.5;
    let (values, _) = eig_sym(&m)?;
    let scale = values.iter().cloned().fold(0.0, f64::max);
    if values.iter().any(|v| *v < -1e-10 * scale.max(1e-300)) {
        return Err(KernelError::Parameter(
            "trait covariance is not positive semidefinite".into(),
        ));
    }
    Ok(values.into_iter().map(|v| v.max(0.0).sqrt()).collect())
}
