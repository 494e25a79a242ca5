use super::flow::{flow_gram, sample_flow, Modulation};
use super::traits::{sample_population, TraitModel};
use super::MonteCarloError;
use crate::kernels::{IsotropicKernel, ProductKernel};
use crate::numerics::RngStream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Pairs `(X, Y)` and `(X, W)` of a sampled triple.
const TRIPLE_PAIRS: [(usize, usize); 2] = [(0, 1), (0, 2)];

/// Number of batches used for batch-means standard errors.
pub const DEFAULT_BATCHES: usize = 32;

/// Kernel, trait model and trait dimension of a flow process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowModel {
    pub kernel: IsotropicKernel,
    pub traits: TraitModel,
    pub dim: usize,
}

impl FlowModel {
    pub fn new(
        kernel: IsotropicKernel,
        traits: TraitModel,
        dim: usize,
    ) -> Result<Self, MonteCarloError> {
        traits.distribution.validate(dim)?;
        Ok(Self {
            kernel,
            traits,
            dim,
        })
    }

    pub fn product_kernel(&self) -> ProductKernel {
        ProductKernel::isotropic(self.kernel)
    }
}

/// A Monte Carlo mean with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub replicates: usize,
    pub rng: RngStream,
}

impl McEstimate {
    /// `|mean - value|` in units of the standard error.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value).abs() / self.stderr
    }
}

/// Per-batch sums for ratio estimators.
#[derive(Debug, Clone, Default)]
pub struct BatchMeans {
    pub numerators: Vec<f64>,
    pub denominators: Vec<f64>,
    pub counts: Vec<usize>,
}

impl BatchMeans {
    /// Overall mean of the numerator per replicate and its standard error.
    pub fn mean(&self) -> (f64, f64) {
        let total: usize = self.counts.iter().sum();
        let mean = self.numerators.iter().sum::<f64>() / total as f64;
        let per_batch: Vec<f64> = self
            .numerators
            .iter()
            .zip(&self.counts)
            .map(|(s, &c)| s / c as f64)
            .collect();
        (mean, spread(&per_batch))
    }

    /// Ratio of numerator to denominator sums and its standard error.
    pub fn ratio(&self) -> (f64, f64) {
        let num: f64 = self.numerators.iter().sum();
        let den: f64 = self.denominators.iter().sum();
        let per_batch: Vec<f64> = self
            .numerators
            .iter()
            .zip(&self.denominators)
            .map(|(n, d)| n / d)
            .collect();
        (num / den, spread(&per_batch))
    }
}

/// Standard error of the mean of `xs`.
fn spread(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// Split `total` replicates into `batches` near-equal counts.
pub(crate) fn batch_sizes(total: usize, batches: usize) -> Vec<usize> {
    (0..batches)
        .map(|b| total / batches + usize::from(b < total % batches))
        .collect()
}

/// Monte Carlo `rho` and `sigma2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoSigmaEstimate {
    /// `None` when the sampled variance is exactly zero.
    pub rho: Option<McEstimate>,
    pub sigma2: McEstimate,
    /// Replicates whose 2x2 Gram needed diagonal jitter.
    pub jittered: usize,
}

/// Estimates `rho` and `sigma2` by sampling traits `(X, Y, W)` and the flow
/// pair `(f(X, Y), f(X, W))` from its 2x2 Gram matrix.
///
/// `sigma2` averages `f(X,Y)^2` and `f(X,W)^2`; `rho` is the ratio of the
/// summed products to the summed squares. Standard errors use
/// [`DEFAULT_BATCHES`] batch means; batch `b` draws from `rng.child(b)`, so
/// the result does not depend on the thread count.
pub fn estimate_rho_sigma(
    model: &FlowModel,
    replicates: usize,
    modulation: Modulation,
    rng: RngStream,
) -> Result<RhoSigmaEstimate, MonteCarloError> {
    if replicates < 2 * DEFAULT_BATCHES {
        return Err(MonteCarloError::Parameter(format!(
            "need at least {} replicates, got {replicates}",
            2 * DEFAULT_BATCHES
        )));
    }
    model.traits.distribution.validate(model.dim)?;
    let kernel = model.product_kernel();
    let sizes = batch_sizes(replicates, DEFAULT_BATCHES);
    let results: Vec<Result<(f64, f64, usize), MonteCarloError>> = sizes
        .par_iter()
        .enumerate()
        .map(|(b, &count)| {
            let mut r = rng.child(b as u64).rng();
            let (mut sq, mut prod, mut jittered) = (0.0, 0.0, 0);
            for _ in 0..count {
                let pop = sample_population(3, model.dim, &model.traits, &mut r)?;
                let gram = flow_gram(&pop, &TRIPLE_PAIRS, &kernel)?;
                let s = sample_flow(gram, &TRIPLE_PAIRS, modulation, &mut r)?;
                sq += 0.5 * (s.values[0] * s.values[0] + s.values[1] * s.values[1]);
                prod += s.values[0] * s.values[1];
                jittered += usize::from(s.jitter > 0.0);
            }
            Ok((sq, prod, jittered))
        })
        .collect();
    let mut sq = BatchMeans::default();
    let mut rho = BatchMeans::default();
    let mut jittered = 0;
    for (res, &count) in results.into_iter().zip(&sizes) {
        let (s, p, j) = res?;
        sq.numerators.push(s);
        sq.denominators.push(count as f64);
        sq.counts.push(count);
        rho.numerators.push(p);
        rho.denominators.push(s);
        rho.counts.push(count);
        jittered += j;
    }
    let (s_mean, s_err) = sq.mean();
    let sigma2 = McEstimate {
        mean: s_mean,
        stderr: s_err,
        replicates,
        rng,
    };
    let rho = (s_mean > 0.0).then(|| {
        let (m, e) = rho.ratio();
        McEstimate {
            mean: m,
            stderr: e,
            replicates,
            rng,
        }
    });
    Ok(RhoSigmaEstimate {
        rho,
        sigma2,
        jittered,
    })
}
