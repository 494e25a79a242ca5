use super::{IsotropicKernel, KernelError};
use nalgebra::DMatrix;

/// Kernel on ordered trait pairs, `k_u([x, y], [v, w]) = amplitude * h(|[x - v, y - w]|)`.
///
/// With a whitening matrix `W` the distance is taken after mapping every
/// difference through `W`, which gives the anisotropic kernel with length
/// scale matrix `(W^T W)^-1` (use `l = 1` for the base kernel in that case).
#[derive(Debug, Clone)]
pub struct ProductKernel {
    pub base: IsotropicKernel,
    pub whitening: Option<DMatrix<f64>>,
}

impl ProductKernel {
    pub fn isotropic(base: IsotropicKernel) -> Self {
        Self {
            base,
            whitening: None,
        }
    }

    pub fn anisotropic(
        base: IsotropicKernel,
        whitening: DMatrix<f64>,
    ) -> Result<Self, KernelError> {
        if !whitening.is_square() {
            return Err(KernelError::Parameter(
                "whitening matrix must be square".into(),
            ));
        }
        Ok(Self {
            base,
            whitening: Some(whitening),
        })
    }

    fn sq_dist(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.whitening {
            None => a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum(),
            Some(w) => {
                let n = w.nrows();
                let mut total = 0.0;
                for i in 0..n {
                    let mut acc = 0.0;
                    for j in 0..n {
                        acc += w[(i, j)] * (a[j] - b[j]);
                    }
                    total += acc * acc;
                }
                total
            }
        }
    }

    /// `k_u([x, y], [v, w])`.
    pub fn eval(&self, x: &[f64], y: &[f64], v: &[f64], w: &[f64]) -> Result<f64, KernelError> {
        let d2 = self.sq_dist(x, v) + self.sq_dist(y, w);
        self.base.covariance(d2.sqrt())
    }

    fn check_dims(&self, points: [&[f64]; 4]) -> Result<(), KernelError> {
        let t = points[0].len();
        if t == 0 || points.iter().any(|p| p.len() != t) {
            return Err(KernelError::Parameter(
                "trait vectors must share a positive dimension".into(),
            ));
        }
        if let Some(w) = &self.whitening {
            if w.nrows() != t {
                return Err(KernelError::Parameter(format!(
                    "whitening matrix is {0}x{0}, traits have dimension {t}",
                    w.nrows()
                )));
            }
        }
        Ok(())
    }
}

/// Covariance of the antisymmetric flow `f(x, y) = u(x, y) - u(y, x)`:
/// `k_u(xy, vw) - k_u(xy, wv) - k_u(yx, vw) + k_u(yx, wv)`.
pub fn flow_kernel(
    k: &ProductKernel,
    x: &[f64],
    y: &[f64],
    v: &[f64],
    w: &[f64],
) -> Result<f64, KernelError> {
    k.check_dims([x, y, v, w])?;
    // grouped so that swapping either pair negates the result exactly
    let forward = k.eval(x, y, v, w)? - k.eval(x, y, w, v)?;
    let backward = k.eval(y, x, v, w)? - k.eval(y, x, w, v)?;
    Ok(forward - backward)
}
