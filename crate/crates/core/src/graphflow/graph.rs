use super::GraphError;
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Attempts allowed before an Erdős–Rényi draw is declared disconnected.
const RETRY_BUDGET: usize = 1000;

/// Undirected simple graph with canonically oriented edges `(i, j)`, `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    components: usize,
}

impl Graph {
    /// Builds a graph from canonical edges. Rejects self-loops, reversed
    /// orientation, out-of-range ids and duplicates.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut seen = HashSet::with_capacity(edges.len());
        for &(i, j) in &edges {
            if i == j {
                return Err(GraphError::Parameter(format!("self-loop at vertex {i}")));
            }
            if i > j {
                return Err(GraphError::Parameter(format!(
                    "edge ({i}, {j}) is not canonically oriented"
                )));
            }
            if j >= vertex_count {
                return Err(GraphError::Parameter(format!(
                    "edge ({i}, {j}) exceeds vertex count {vertex_count}"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(GraphError::Parameter(format!("duplicate edge ({i}, {j})")));
            }
        }
        let components = count_components(vertex_count, &edges);
        Ok(Self {
            vertex_count,
            edges,
            components,
        })
    }

    /// Complete graph on `v` vertices with edges in lexicographic order.
    pub fn complete(v: usize) -> Self {
        let edges = (0..v)
            .flat_map(|i| (i + 1..v).map(move |j| (i, j)))
            .collect();
        Self::new(v, edges).expect("complete graph is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn is_connected(&self) -> bool {
        self.components == 1
    }

    /// Dimension of the cycle space, `E - V + components`.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.components - self.vertex_count
    }

    /// Adjacency lists of `(neighbour, edge index, sign)`, where the sign is
    /// `+1` when the vertex is the edge's tail.
    pub(crate) fn incidence(&self) -> Vec<Vec<(usize, usize, f64)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            adj[i].push((j, e, 1.0));
            adj[j].push((i, e, -1.0));
        }
        adj
    }
}

fn count_components(v: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..v).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut components = v;
    for &(i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    components
}

/// Random graph families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphModel {
    Complete { vertices: usize },
    ErdosRenyi { vertices: usize, p: f64 },
}

/// A sampled graph and the number of draws it took.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedGraph {
    pub graph: Graph,
    pub attempts: usize,
}

/// Samples a connected graph. Erdős–Rényi draws are repeated until connected.
pub fn generate_graph<R: Rng + ?Sized>(
    model: &GraphModel,
    rng: &mut R,
) -> Result<GeneratedGraph, GraphError> {
    match *model {
        GraphModel::Complete { vertices } => {
            if vertices < 2 {
                return Err(GraphError::Parameter(format!(
                    "need at least 2 vertices, got {vertices}"
                )));
            }
            Ok(GeneratedGraph {
                graph: Graph::complete(vertices),
                attempts: 1,
            })
        }
        GraphModel::ErdosRenyi { vertices, p } => {
            if vertices < 2 {
                return Err(GraphError::Parameter(format!(
                    "need at least 2 vertices, got {vertices}"
                )));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(GraphError::Parameter(format!(
                    "edge probability must lie in [0, 1], got {p}"
                )));
            }
            for attempt in 1..=RETRY_BUDGET {
                let edges: Vec<(usize, usize)> = (0..vertices)
                    .flat_map(|i| (i + 1..vertices).map(move |j| (i, j)))
                    .filter(|_| rng.random::<f64>() < p)
                    .collect();
                let graph = Graph::new(vertices, edges)?;
                if graph.is_connected() {
                    return Ok(GeneratedGraph {
                        graph,
                        attempts: attempt,
                    });
                }
            }
            Err(GraphError::RetryBudget {
                attempts: RETRY_BUDGET,
            })
        }
    }
}

/// Sparse symmetric `E x E` matrix with entries in `{-1, +1}` for edges that
/// share exactly one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedEdgeAdjacency {
    edge_count: usize,
    /// Entries `(a, b, sign)` with `a < b`.
    entries: Vec<(usize, usize, i8)>,
}

impl SignedEdgeAdjacency {
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Upper-triangle entries `(a, b, sign)`, `a < b`.
    pub fn entries(&self) -> &[(usize, usize, i8)] {
        &self.entries
    }

    pub fn get(&self, a: usize, b: usize) -> i8 {
        let key = (a.min(b), a.max(b));
        self.entries
            .binary_search_by(|&(x, y, _)| (x, y).cmp(&key))
            .map(|k| self.entries[k].2)
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.edge_count, self.edge_count);
        for &(a, b, s) in &self.entries {
            m[(a, b)] = f64::from(s);
            m[(b, a)] = f64::from(s);
        }
        m
    }
}

/// Sign is `+1` when the shared vertex is the tail of both edges or the head
/// of both, and `-1` when the head of one meets the tail of the other.
pub fn signed_edge_adjacency(g: &Graph) -> SignedEdgeAdjacency {
    let inc = g.incidence();
    let mut entries = Vec::new();
    for list in &inc {
        for (p, &(_, a, sa)) in list.iter().enumerate() {
            for &(_, b, sb) in &list[p + 1..] {
                let sign = if sa == sb { 1 } else { -1 };
                entries.push((a.min(b), a.max(b), sign));
            }
        }
    }
    entries.sort_unstable();
    SignedEdgeAdjacency {
        edge_count: g.edge_count(),
        entries,
    }
}
