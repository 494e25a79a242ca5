use super::MonteCarloError;
use crate::kernels::IsotropicKernel;
use crate::numerics::{cholesky_psd, RngStream};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Largest grid a single path may be sampled on.
pub const MAX_GRID: usize = 10_000;

/// One sampled view of a path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathLevel {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Diagonal jitter the factorization needed (0 when none).
    pub jitter: f64,
}

/// Nested zoom layout: level `k` covers `width / factor^k` around `centre`
/// with `points` evenly spaced grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoomSpec {
    pub centre: f64,
    pub width: f64,
    pub points: usize,
    pub levels: usize,
    #[serde(default = "default_factor")]
    pub factor: f64,
}

fn default_factor() -> f64 {
    3.0
}

impl ZoomSpec {
    pub fn new(centre: f64, width: f64, points: usize, levels: usize) -> Self {
        Self {
            centre,
            width,
            points,
            levels,
            factor: default_factor(),
        }
    }

    pub fn validate(&self) -> Result<(), MonteCarloError> {
        let ok = self.centre.is_finite()
            && self.width.is_finite()
            && self.width > 0.0
            && self.factor.is_finite()
            && self.factor > 1.0
            && self.points >= 1
            && self.levels >= 1
            && self.points * self.levels <= MAX_GRID;
        if ok {
            Ok(())
        } else {
            Err(MonteCarloError::Parameter(format!(
                "invalid zoom layout {self:?}: need width > 0, factor > 1, points and levels >= 1, points*levels <= {MAX_GRID}"
            )))
        }
    }

    /// Grid of level `k`.
    pub fn grid(&self, k: usize) -> Vec<f64> {
        let half = 0.5 * self.width / self.factor.powi(k as i32);
        if self.points == 1 {
            return vec![self.centre];
        }
        let step = 2.0 * half / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.centre - half + step * i as f64)
            .collect()
    }
}

fn check_grid(grid: &[f64]) -> Result<(), MonteCarloError> {
    if grid.is_empty() || grid.len() > MAX_GRID {
        return Err(MonteCarloError::Parameter(format!(
            "grid must hold between 1 and {MAX_GRID} points, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(MonteCarloError::Parameter(
            "grid must be finite and sorted".into(),
        ));
    }
    Ok(())
}

fn gram(kernel: &IsotropicKernel, a: &[f64], b: &[f64]) -> Result<DMatrix<f64>, MonteCarloError> {
    let mut m = DMatrix::zeros(a.len(), b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            m[(i, j)] = kernel.eval_h((x - y).abs())?;
        }
    }
    Ok(m)
}

fn normals<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Samples a unit-variance Matérn process at the points of `grid`.
pub fn sample_matern_path_1d<R: Rng + ?Sized>(
    nu: f64,
    l: f64,
    grid: &[f64],
    rng: &mut R,
) -> Result<PathLevel, MonteCarloError> {
    check_grid(grid)?;
    let kernel = IsotropicKernel::matern(nu, l)?;
    let factor = cholesky_psd(&gram(&kernel, grid, grid)?)?;
    let values = factor.mul_lower(&normals(grid.len(), rng));
    Ok(PathLevel {
        grid: grid.to_vec(),
        values: values.iter().copied().collect(),
        jitter: factor.jitter,
    })
}

/// Samples one path at successively finer zoom levels.
///
/// Level 0 is an unconditional draw. Each later level is drawn from the
/// conditional law given every value already sampled, so all levels are
/// views of one path. Grid points shared with earlier levels reuse their
/// values. The draws come from `rng.rng()` alone, so two calls with the same
/// stream and different `nu` consume identical normal variates.
pub fn sample_matern_zoom(
    nu: f64,
    l: f64,
    spec: &ZoomSpec,
    rng: RngStream,
) -> Result<Vec<PathLevel>, MonteCarloError> {
    spec.validate()?;
    let kernel = IsotropicKernel::matern(nu, l)?;
    let mut r = rng.rng();
    let mut known_x: Vec<f64> = Vec::new();
    let mut known_y: Vec<f64> = Vec::new();
    let mut levels = Vec::with_capacity(spec.levels);
    for k in 0..spec.levels {
        let grid = spec.grid(k);
        let mut values = vec![f64::NAN; grid.len()];
        let mut fresh = Vec::new();
        for (i, x) in grid.iter().enumerate() {
            match known_x.iter().position(|k| k == x) {
                Some(p) => values[i] = known_y[p],
                None => fresh.push(i),
            }
        }
        let new_x: Vec<f64> = fresh.iter().map(|&i| grid[i]).collect();
        let mut jitter = 0.0;
        if !new_x.is_empty() {
            let k_nn = gram(&kernel, &new_x, &new_x)?;
            let (mean, cov) = if known_x.is_empty() {
                (DVector::zeros(new_x.len()), k_nn)
            } else {
                let k_oo = cholesky_psd(&gram(&kernel, &known_x, &known_x)?)?;
                let k_on = gram(&kernel, &known_x, &new_x)?;
                let alpha = k_oo.solve(&DVector::from_column_slice(&known_y));
                let mean = k_on.transpose() * alpha;
                let mut solved = DMatrix::zeros(known_x.len(), new_x.len());
                for j in 0..new_x.len() {
                    solved.set_column(j, &k_oo.solve(&k_on.column(j).into_owned()));
                }
                let mut cov = k_nn - k_on.transpose() * solved;
                cov = 0.5 * (&cov + cov.transpose());
                (mean, cov)
            };
            let factor = cholesky_psd(&cov)?;
            jitter = factor.jitter;
            let draw = mean + factor.mul_lower(&normals(new_x.len(), &mut r));
            for (slot, &i) in fresh.iter().enumerate() {
                values[i] = draw[slot];
            }
            known_x.extend_from_slice(&new_x);
            known_y.extend(draw.iter());
        }
        levels.push(PathLevel {
            grid,
            values,
            jitter,
        });
    }
    Ok(levels)
}
