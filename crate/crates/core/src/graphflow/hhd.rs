use super::graph::Graph;
use super::GraphError;
use crate::numerics::NumericsError;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Vertex count from which the potential is found by conjugate gradients
/// instead of a dense factorization.
pub const DENSE_LIMIT: usize = 2000;

/// One value per canonically oriented edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeFlow {
    pub values: Vec<f64>,
}

impl EdgeFlow {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn dot(&self, other: &EdgeFlow) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Net outflow at every vertex.
    pub fn divergence(&self, g: &Graph) -> Vec<f64> {
        let mut div = vec![0.0; g.vertex_count()];
        for (&(i, j), &v) in g.edges().iter().zip(&self.values) {
            div[i] += v;
            div[j] -= v;
        }
        div
    }

    /// Euclidean norm of the per-vertex sums of `|value|`, the scale of the
    /// round-off in [`EdgeFlow::divergence`].
    fn divergence_magnitude(&self, g: &Graph) -> f64 {
        let mut acc = vec![0.0; g.vertex_count()];
        for (&(i, j), &v) in g.edges().iter().zip(&self.values) {
            acc[i] += v.abs();
            acc[j] += v.abs();
        }
        acc.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Gradient flow `s(i) - s(j)` of a vertex potential.
    pub fn gradient(g: &Graph, potential: &[f64]) -> Self {
        Self {
            values: g
                .edges()
                .iter()
                .map(|&(i, j)| potential[i] - potential[j])
                .collect(),
        }
    }
}

/// Transitive (gradient) and cyclic (divergence-free) parts of a flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HhdResult {
    pub transitive: EdgeFlow,
    pub cyclic: EdgeFlow,
    /// Mean-zero vertex potential with `transitive = gradient(potential)`.
    pub potential: Vec<f64>,
    pub transitive_norm2: f64,
    pub cyclic_norm2: f64,
}

/// Splits `f` into `F_t(i, j) = s(i) - s(j)` and `F_c = f - F_t`, where `s`
/// minimizes `sum (s(i) - s(j) - f(i, j))^2` with `mean(s) = 0`.
///
/// Solves `(L + 11'/V) s = div f`, with `L` the graph Laplacian. The rank-one
/// term removes the constant null space without changing the answer because
/// `div f` sums to zero. Dense Cholesky is used below [`DENSE_LIMIT`]
/// vertices, conjugate gradients above; both finish with residual
/// refinement so that `F_c` is divergence-free to round-off. A norm or
/// potential that overflows is reported as a numerical error.
pub fn hhd_decompose(g: &Graph, f: &EdgeFlow) -> Result<HhdResult, GraphError> {
    if f.len() != g.edge_count() {
        return Err(GraphError::Parameter(format!(
            "flow has {} values for {} edges",
            f.len(),
            g.edge_count()
        )));
    }
    if f.values.iter().any(|v| !v.is_finite()) {
        return Err(GraphError::Parameter("flow values must be finite".into()));
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected {
            components: g.components(),
        });
    }
    let div = DVector::from_vec(f.divergence(g));
    let potential = if g.vertex_count() < DENSE_LIMIT {
        solve_dense(g, &div)?
    } else {
        solve_cg(g, &div, f64::EPSILON * f.divergence_magnitude(g))?
    };
    let transitive = EdgeFlow::gradient(g, potential.as_slice());
    let cyclic = EdgeFlow::new(
        f.values
            .iter()
            .zip(&transitive.values)
            .map(|(a, b)| a - b)
            .collect(),
    );
    let result = HhdResult {
        transitive_norm2: transitive.norm2(),
        cyclic_norm2: cyclic.norm2(),
        transitive,
        cyclic,
        potential: potential.iter().copied().collect(),
    };
    let finite = result.transitive_norm2.is_finite()
        && result.cyclic_norm2.is_finite()
        && result.potential.iter().all(|v| v.is_finite());
    if !finite {
        return Err(GraphError::Numerics(NumericsError::Overflow(
            "flow decomposition".into(),
        )));
    }
    Ok(result)
}

/// `(L + 11'/V) s`.
fn apply(g: &Graph, s: &DVector<f64>) -> DVector<f64> {
    let v = g.vertex_count();
    let mean = s.sum() / v as f64;
    let mut out = DVector::from_element(v, mean);
    for &(i, j) in g.edges() {
        let d = s[i] - s[j];
        out[i] += d;
        out[j] -= d;
    }
    out
}

fn solve_dense(g: &Graph, div: &DVector<f64>) -> Result<DVector<f64>, GraphError> {
    let v = g.vertex_count();
    let mut m = DMatrix::from_element(v, v, 1.0 / v as f64);
    for &(i, j) in g.edges() {
        m[(i, i)] += 1.0;
        m[(j, j)] += 1.0;
        m[(i, j)] -= 1.0;
        m[(j, i)] -= 1.0;
    }
    let chol = m
        .cholesky()
        .ok_or(GraphError::Numerics(NumericsError::NotPsd {
            max_jitter: 0.0,
        }))?;
    let mut s = chol.solve(div);
    for _ in 0..2 {
        let r = div - apply(g, &s);
        s += chol.solve(&r);
    }
    Ok(s)
}

/// Conjugate gradients on the recurrence residual, refreshed from the true
/// residual every `REFRESH` steps. The stopping target is the larger of a
/// relative `1e-13 |div|` and the round-off already present in `div`.
fn solve_cg(g: &Graph, div: &DVector<f64>, noise: f64) -> Result<DVector<f64>, GraphError> {
    const REFRESH: usize = 50;
    let v = g.vertex_count();
    let target = (1e-13 * div.norm()).max(16.0 * noise);
    let mut s = DVector::zeros(v);
    let mut r = div.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    for it in 1..=20 * v {
        if rr.sqrt() <= target {
            r = div - apply(g, &s);
            rr = r.dot(&r);
            if rr.sqrt() <= target {
                return Ok(s);
            }
            p = r.clone();
        }
        let ap = apply(g, &p);
        let alpha = rr / p.dot(&ap);
        s.axpy(alpha, &p, 1.0);
        if it % REFRESH == 0 {
            r = div - apply(g, &s);
        } else {
            r.axpy(-alpha, &ap, 1.0);
        }
        let rr_new = r.dot(&r);
        p = &r + (rr_new / rr) * &p;
        rr = rr_new;
    }
    let true_r = (div - apply(g, &s)).norm();
    if true_r <= 1e3 * target {
        return Ok(s);
    }
    Err(GraphError::Numerics(NumericsError::NoConvergence {
        estimate: f64::NAN,
        error: true_r / div.norm().max(f64::MIN_POSITIVE),
    }))
}
