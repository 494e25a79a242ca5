use super::traits::TraitSample;
use super::MonteCarloError;
use crate::kernels::{flow_kernel, ProductKernel};
use crate::numerics::cholesky_psd;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Optional non-Gaussian modulation of a sampled flow vector.
///
/// Both modulations multiply the whole vector by an independent random
/// scalar `m` with `E[m^2] = 1`, so the covariance is unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulation {
    #[default]
    None,
    /// `m = ±1` with equal probability. The law of the flow is unchanged.
    SignFlip,
    /// `m = sqrt(1 + e)` with `e = ±1`, i.e. `m ∈ {0, sqrt(2)}`. The flow
    /// is then a non-Gaussian scale mixture with the same covariance.
    RademacherScale,
}

impl Modulation {
    pub(crate) fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Modulation::None => 1.0,
            Modulation::SignFlip => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Modulation::RademacherScale => {
                if rng.random::<bool>() {
                    std::f64::consts::SQRT_2
                } else {
                    0.0
                }
            }
        }
    }
}

/// A flow drawn on a list of ordered vertex pairs.
///
/// Each unordered pair is sampled once; the reverse orientation is read by
/// negation, so `value(i, j) + value(j, i) == 0` exactly.
#[derive(Debug, Clone)]
pub struct FlowSample {
    pub pairs: Vec<(usize, usize)>,
    pub values: Vec<f64>,
    /// The Gram matrix the values were drawn from.
    pub covariance: DMatrix<f64>,
    /// Diagonal jitter the factorization needed.
    pub jitter: f64,
}

impl FlowSample {
    /// Flow from `i` to `j`, if the pair was sampled in either orientation.
    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            return Some(0.0);
        }
        self.pairs
            .iter()
            .zip(&self.values)
            .find_map(|(&(a, b), &v)| {
                if (a, b) == (i, j) {
                    Some(v)
                } else if (a, b) == (j, i) {
                    Some(-v)
                } else {
                    None
                }
            })
    }
}

/// Flow covariance over ordered pairs of trait rows: entry `(e, e')` is the
/// flow kernel at the pairs' trait vectors.
pub fn flow_gram(
    traits: &TraitSample,
    pairs: &[(usize, usize)],
    kernel: &ProductKernel,
) -> Result<DMatrix<f64>, MonteCarloError> {
    let n = traits.len();
    if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= n || j >= n) {
        return Err(MonteCarloError::Parameter(format!(
            "pair ({i}, {j}) references a trait row outside 0..{n}"
        )));
    }
    let rows: Vec<Vec<f64>> = (0..n).map(|i| traits.row(i)).collect();
    let m = pairs.len();
    let mut g = DMatrix::zeros(m, m);
    for a in 0..m {
        let (x, y) = (&rows[pairs[a].0], &rows[pairs[a].1]);
        for b in 0..=a {
            let (v, w) = (&rows[pairs[b].0], &rows[pairs[b].1]);
            let val = flow_kernel(kernel, x, y, v, w)?;
            g[(a, b)] = val;
            g[(b, a)] = val;
        }
    }
    Ok(g)
}

/// Draws a mean-zero Gaussian vector with covariance `gram` over `pairs`,
/// then applies `modulation`.
pub fn sample_flow<R: Rng + ?Sized>(
    gram: DMatrix<f64>,
    pairs: &[(usize, usize)],
    modulation: Modulation,
    rng: &mut R,
) -> Result<FlowSample, MonteCarloError> {
    if gram.nrows() != pairs.len() || gram.ncols() != pairs.len() {
        return Err(MonteCarloError::Parameter(format!(
            "gram is {}x{} but {} pairs were given",
            gram.nrows(),
            gram.ncols(),
            pairs.len()
        )));
    }
    let factor = cholesky_psd(&gram)?;
    let z = DVector::from_fn(pairs.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
    let m = modulation.draw(rng);
    let values = factor.mul_lower(&z).iter().map(|v| m * v).collect();
    Ok(FlowSample {
        pairs: pairs.to_vec(),
        values,
        covariance: gram,
        jitter: factor.jitter,
    })
}
