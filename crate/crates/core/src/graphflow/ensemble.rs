use super::graph::Graph;
use super::hhd::{hhd_decompose, EdgeFlow};
use super::GraphError;
use crate::correlation::model_correlation;
use crate::kernels::{IsotropicKernel, ProductKernel};
use crate::montecarlo::{
    flow_gram, sample_flow, sample_population, Modulation, TraitDistribution, TraitModel,
    DEFAULT_BATCHES,
};
use crate::numerics::{QuadratureSpec, RngStream};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Expected squared norms of the transitive and cyclic parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentNorms {
    pub transitive: f64,
    pub cyclic: f64,
}

impl ComponentNorms {
    pub fn total(&self) -> f64 {
        self.transitive + self.cyclic
    }
}

/// `E|F_t|^2 = sigma2 ((V - 1) + 2 rho L)` and `E|F_c|^2 = sigma2 (1 - 2 rho) L`
/// with `L = E - (V - 1)`. `vertices` and `edges` may be expectations over a
/// random connected graph.
pub fn expected_component_norms(
    vertices: f64,
    edges: f64,
    sigma2: f64,
    rho: f64,
) -> Result<ComponentNorms, GraphError> {
    if !(0.0..=0.5).contains(&rho) {
        return Err(GraphError::Parameter(format!(
            "rho must lie in [0, 1/2], got {rho}"
        )));
    }
    if !(sigma2.is_finite() && sigma2 >= 0.0) {
        return Err(GraphError::Parameter(format!(
            "sigma2 must be non-negative, got {sigma2}"
        )));
    }
    let cycles = edges - (vertices - 1.0);
    if !(vertices >= 1.0 && cycles >= 0.0) {
        return Err(GraphError::Parameter(format!(
            "need V >= 1 and E >= V - 1, got V = {vertices}, E = {edges}"
        )));
    }
    Ok(ComponentNorms {
        transitive: sigma2 * ((vertices - 1.0) + 2.0 * rho * cycles),
        cyclic: sigma2 * (1.0 - 2.0 * rho) * cycles,
    })
}

/// Draws one trait vector per vertex and then one joint Gaussian flow over
/// all edges from the full flow Gram matrix.
pub fn sample_graph_flow<R: Rng + ?Sized>(
    g: &Graph,
    kernel: &ProductKernel,
    traits: &TraitModel,
    dim: usize,
    rng: &mut R,
) -> Result<EdgeFlow, GraphError> {
    let pop = sample_population(g.vertex_count(), dim, traits, rng)?;
    let gram = flow_gram(&pop, g.edges(), kernel)?;
    let sample = sample_flow(gram, g.edges(), Modulation::None, rng)?;
    Ok(EdgeFlow::new(sample.values))
}

/// Sampled component norms next to their predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowEnsembleReport {
    pub vertices: usize,
    pub edges: usize,
    pub replicates: usize,
    pub sigma2: f64,
    pub rho: f64,
    pub mean_transitive: f64,
    pub stderr_transitive: f64,
    pub predicted_transitive: f64,
    pub mean_cyclic: f64,
    pub stderr_cyclic: f64,
    pub predicted_cyclic: f64,
    pub mean_total: f64,
    pub stderr_total: f64,
    pub predicted_total: f64,
    pub rng: RngStream,
}

impl FlowEnsembleReport {
    /// Largest `|mean - prediction| / stderr` over the three norms. Zero
    /// spread with exact agreement counts as 0.
    pub fn max_z(&self) -> f64 {
        [
            (
                self.mean_transitive,
                self.predicted_transitive,
                self.stderr_transitive,
            ),
            (self.mean_cyclic, self.predicted_cyclic, self.stderr_cyclic),
            (self.mean_total, self.predicted_total, self.stderr_total),
        ]
        .iter()
        .map(|&(m, p, s)| {
            let d = (m - p).abs();
            if d == 0.0 {
                0.0
            } else {
                d / s
            }
        })
        .fold(0.0, f64::max)
    }
}

/// Samples `replicates` flows on `g`, decomposes each, and compares the mean
/// norms with [`expected_component_norms`] fed by
/// [`crate::correlation::model_correlation`]. Standard errors use
/// [`DEFAULT_BATCHES`] batch means drawn from `rng.child(b)`.
pub fn validate_trait_performance(
    g: &Graph,
    kernel: &IsotropicKernel,
    traits: &TraitModel,
    dim: usize,
    replicates: usize,
    rng: RngStream,
) -> Result<FlowEnsembleReport, GraphError> {
    if replicates < 100 {
        return Err(GraphError::Parameter(format!(
            "need at least 100 replicates, got {replicates}"
        )));
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected {
            components: g.components(),
        });
    }
    let degenerate =
        matches!(traits.distribution, TraitDistribution::Gaussian { sigma_x } if sigma_x == 0.0);
    let (sigma2, rho) = if degenerate {
        (0.0, 0.5)
    } else {
        let c = model_correlation(kernel, traits, dim, &QuadratureSpec::default())?;
        (c.sigma2, c.rho)
    };
    let predicted =
        expected_component_norms(g.vertex_count() as f64, g.edge_count() as f64, sigma2, rho)?;
    let pk = ProductKernel::isotropic(*kernel);
    let sizes: Vec<usize> = (0..DEFAULT_BATCHES)
        .map(|b| replicates / DEFAULT_BATCHES + usize::from(b < replicates % DEFAULT_BATCHES))
        .collect();
    let batches: Vec<Result<[f64; 3], GraphError>> = sizes
        .par_iter()
        .enumerate()
        .map(|(b, &count)| {
            let mut r = rng.child(b as u64).rng();
            let mut acc = [0.0; 3];
            for _ in 0..count {
                let f = sample_graph_flow(g, &pk, traits, dim, &mut r)?;
                let h = hhd_decompose(g, &f)?;
                acc[0] += h.transitive_norm2;
                acc[1] += h.cyclic_norm2;
                acc[2] += f.norm2();
            }
            Ok(acc.map(|s| s / count as f64))
        })
        .collect();
    let batches = batches.into_iter().collect::<Result<Vec<_>, _>>()?;
    let stat = |k: usize| {
        let xs: Vec<f64> = batches.iter().map(|b| b[k]).collect();
        let weighted = batches
            .iter()
            .zip(&sizes)
            .map(|(b, &c)| b[k] * c as f64)
            .sum::<f64>()
            / replicates as f64;
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (weighted, (var / n).sqrt())
    };
    let (mt, st) = stat(0);
    let (mc, sc) = stat(1);
    let (ma, sa) = stat(2);
    Ok(FlowEnsembleReport {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        replicates,
        sigma2,
        rho,
        mean_transitive: mt,
        stderr_transitive: st,
        predicted_transitive: predicted.transitive,
        mean_cyclic: mc,
        stderr_cyclic: sc,
        predicted_cyclic: predicted.cyclic,
        mean_total: ma,
        stderr_total: sa,
        predicted_total: predicted.total(),
        rng,
    })
}
