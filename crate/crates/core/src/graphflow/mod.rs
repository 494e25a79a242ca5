//! Random graphs, edge flows and the two-part Helmholtz-Hodge split.
//!
//! Edges are stored with the canonical orientation `i < j`; a flow value on
//! `(i, j)` implies `-value` on `(j, i)`.

mod ensemble;
mod graph;
mod hhd;
mod io;

pub use ensemble::{
    expected_component_norms, sample_graph_flow, validate_trait_performance, ComponentNorms,
    FlowEnsembleReport,
};
pub use graph::{
    generate_graph, signed_edge_adjacency, GeneratedGraph, Graph, GraphModel, SignedEdgeAdjacency,
};
pub use hhd::{hhd_decompose, EdgeFlow, HhdResult, DENSE_LIMIT};
pub use io::{parse_edge_list, read_edge_list, write_hhd_csv, EdgeList};

use crate::correlation::CorrelationError;
use crate::kernels::KernelError;
use crate::montecarlo::MonteCarloError;
use crate::numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("no connected graph after {attempts} attempts")]
    RetryBudget { attempts: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    MonteCarlo(#[from] MonteCarloError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
}
