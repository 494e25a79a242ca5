//! Guarded dense factorizations.

use super::NumericsError;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Diagonal jitter multipliers tried in order, relative to `trace / n`.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-12, 1e-10, 1e-8];

/// Lower Cholesky factor of `A + jitter * I`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    pub lower: DMatrix<f64>,
    /// Absolute diagonal shift that made the factorization succeed.
    pub jitter: f64,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    /// `L z`, which has covariance `A + jitter I` when `z` is standard normal.
    pub fn mul_lower(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.lower * z
    }

    /// Solves `(A + jitter I) x = b`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let y = self
            .lower
            .solve_lower_triangular(b)
            .expect("Cholesky factor has a positive diagonal");
        self.lower
            .tr_solve_lower_triangular(&y)
            .expect("Cholesky factor has a positive diagonal")
    }
}

fn check_symmetric(a: &DMatrix<f64>) -> Result<(), NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::Shape(format!(
            "{}x{} matrix is not square",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::Domain(
            "matrix has non-finite entries".into(),
        ));
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let n = a.nrows();
    for i in 0..n {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-10 * scale {
                return Err(NumericsError::Shape(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Cholesky factorization of a symmetric positive semidefinite matrix.
///
/// Tries each step of [`JITTER_LADDER`] (scaled by the mean diagonal) and
/// reports the shift that was needed. The zero matrix factors to zero.
pub fn cholesky_psd(a: &DMatrix<f64>) -> Result<CholeskyFactor, NumericsError> {
    check_symmetric(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(CholeskyFactor {
            lower: DMatrix::zeros(0, 0),
            jitter: 0.0,
        });
    }
    if a.iter().all(|v| *v == 0.0) {
        return Ok(CholeskyFactor {
            lower: DMatrix::zeros(n, n),
            jitter: 0.0,
        });
    }
    let mean_diag = a.trace() / n as f64;
    let mut max_jitter = 0.0;
    for step in JITTER_LADDER {
        let jitter = step * mean_diag.abs();
        max_jitter = jitter;
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] += jitter;
        }
        if let Some(chol) = nalgebra::Cholesky::new(shifted) {
            return Ok(CholeskyFactor {
                lower: chol.l(),
                jitter,
            });
        }
    }
    Err(NumericsError::NotPsd { max_jitter })
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues in descending order.
///
/// Column `k` of the returned matrix is the unit eigenvector of value `k`.
pub fn eig_sym(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>), NumericsError> {
    check_symmetric(a)?;
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), a.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}
