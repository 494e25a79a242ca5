use super::MonteCarloError;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

/// Marginal law of one vertex trait vector in `R^T`.
///
/// Laplace and Student-t are multivariate Gaussian scale mixtures: the trait
/// is `sqrt(V) Z` with `Z` standard normal and `V` exponential (mean
/// `2 scale^2`) or inverse gamma (`df/2`, `scale^2 df/2`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum TraitDistribution {
    Gaussian { sigma_x: f64 },
    GaussianAnisotropic { cov: Vec<Vec<f64>> },
    Laplace { scale: f64 },
    StudentT { df: f64, scale: f64 },
}

/// Whether the mixing variance of a scale-mixture law is drawn once for the
/// whole population or separately for every vertex.
///
/// The mixture formulas for `rho` describe the population-shared case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleSharing {
    #[default]
    Population,
    Vertex,
}

/// A trait law together with its sharing rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraitModel {
    #[serde(rename = "law")]
    pub distribution: TraitDistribution,
    #[serde(default)]
    pub sharing: ScaleSharing,
}

impl TraitModel {
    pub fn new(distribution: TraitDistribution) -> Self {
        Self {
            distribution,
            sharing: ScaleSharing::Population,
        }
    }

    pub fn with_sharing(mut self, sharing: ScaleSharing) -> Self {
        self.sharing = sharing;
        self
    }
}

/// `n` trait vectors stored as the rows of an `n x T` matrix.
#[derive(Debug, Clone)]
pub struct TraitSample {
    pub traits: DMatrix<f64>,
}

impl TraitSample {
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.traits.row(i).iter().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.traits.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.traits.nrows() == 0
    }
}

fn positive(name: &str, v: f64) -> Result<(), MonteCarloError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(MonteCarloError::Parameter(format!(
            "{name} must be finite and positive, got {v}"
        )))
    }
}

impl TraitDistribution {
    /// Checks parameters against the trait dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<(), MonteCarloError> {
        if dim == 0 {
            return Err(MonteCarloError::Parameter(
                "trait dimension must be at least 1".into(),
            ));
        }
        match self {
            TraitDistribution::Gaussian { sigma_x } => {
                if !(sigma_x.is_finite() && *sigma_x >= 0.0) {
                    return Err(MonteCarloError::Parameter(format!(
                        "sigma_x must be non-negative, got {sigma_x}"
                    )));
                }
                Ok(())
            }
            TraitDistribution::GaussianAnisotropic { cov } => {
                if cov.len() != dim || cov.iter().any(|r| r.len() != dim) {
                    return Err(MonteCarloError::Parameter(format!(
                        "trait covariance must be {dim}x{dim}"
                    )));
                }
                Ok(())
            }
            TraitDistribution::Laplace { scale } => positive("Laplace scale", *scale),
            TraitDistribution::StudentT { df, scale } => {
                positive("degrees of freedom", *df)?;
                positive("Student-t scale", *scale)
            }
        }
    }

    /// Lower factor of the base covariance, for the anisotropic law.
    fn factor(&self, dim: usize) -> Result<Option<DMatrix<f64>>, MonteCarloError> {
        match self {
            TraitDistribution::GaussianAnisotropic { cov } => {
                let m = DMatrix::from_fn(dim, dim, |i, j| cov[i][j]);
                let c = crate::numerics::cholesky_psd(&m)?;
                Ok(Some(c.lower))
            }
            _ => Ok(None),
        }
    }

    /// One draw of the variance multiplier `V`.
    fn draw_variance<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            TraitDistribution::Gaussian { sigma_x } => sigma_x * sigma_x,
            TraitDistribution::GaussianAnisotropic { .. } => 1.0,
            TraitDistribution::Laplace { scale } => Exp::new(1.0 / (2.0 * scale * scale))
                .expect("validated")
                .sample(rng),
            TraitDistribution::StudentT { df, scale } => {
                let g: f64 = Gamma::new(df / 2.0, 1.0).expect("validated").sample(rng);
                scale * scale * (df / 2.0) / g
            }
        }
    }

    /// Marginal variance of one coordinate, when finite.
    pub fn coordinate_variance(&self) -> Option<f64> {
        match *self {
            TraitDistribution::Gaussian { sigma_x } => Some(sigma_x * sigma_x),
            TraitDistribution::GaussianAnisotropic { .. } => None,
            TraitDistribution::Laplace { scale } => Some(2.0 * scale * scale),
            TraitDistribution::StudentT { df, scale } => {
                (df > 2.0).then(|| scale * scale * df / (df - 2.0))
            }
        }
    }
}

fn draw_rows<R: Rng + ?Sized>(
    n: usize,
    dim: usize,
    dist: &TraitDistribution,
    shared: Option<f64>,
    rng: &mut R,
) -> Result<TraitSample, MonteCarloError> {
    dist.validate(dim)?;
    let factor = dist.factor(dim)?;
    let mut traits = DMatrix::zeros(n, dim);
    let mut z = vec![0.0; dim];
    for i in 0..n {
        let v = match shared {
            Some(v) => v,
            None => dist.draw_variance(rng),
        };
        let s = v.sqrt();
        for zj in z.iter_mut() {
            *zj = rng.sample(StandardNormal);
        }
        match &factor {
            Some(l) => {
                for a in 0..dim {
                    traits[(i, a)] = (0..=a).map(|b| l[(a, b)] * z[b]).sum::<f64>();
                }
            }
            None => {
                for a in 0..dim {
                    traits[(i, a)] = s * z[a];
                }
            }
        }
    }
    Ok(TraitSample { traits })
}

/// `n` independent trait vectors from `dist` in dimension `dim`.
pub fn sample_traits<R: Rng + ?Sized>(
    n: usize,
    dim: usize,
    dist: &TraitDistribution,
    rng: &mut R,
) -> Result<TraitSample, MonteCarloError> {
    draw_rows(n, dim, dist, None, rng)
}

/// `n` trait vectors for one population under `model`.
///
/// With [`ScaleSharing::Population`] a single variance multiplier is drawn
/// and shared by every row, so rows are exchangeable but not independent.
pub fn sample_population<R: Rng + ?Sized>(
    n: usize,
    dim: usize,
    model: &TraitModel,
    rng: &mut R,
) -> Result<TraitSample, MonteCarloError> {
    let dist = &model.distribution;
    match model.sharing {
        ScaleSharing::Vertex => draw_rows(n, dim, dist, None, rng),
        ScaleSharing::Population => {
            dist.validate(dim)?;
            let v = dist.draw_variance(rng);
            draw_rows(n, dim, dist, Some(v), rng)
        }
    }
}
