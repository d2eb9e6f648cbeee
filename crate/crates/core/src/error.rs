// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("node id {id} out of range (graph has {num_nodes} nodes)")]
    NodeOutOfRange { id: usize, num_nodes: usize },
    #[error("graph with {0} nodes exceeds the 32-bit node id space")]
    TooManyNodes(usize),
    #[error("duplicate edge {source_node} -> {target}")]
    DuplicateEdge { source_node: usize, target: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("label count {labels} does not match node count {num_nodes}")]
    LabelCount { labels: usize, num_nodes: usize },

    #[error("subset is empty")]
    EmptySubset,
    #[error("subset has {members} members but the graph only {num_nodes} nodes")]
    SubsetTooLarge { members: usize, num_nodes: usize },
    #[error("node {0} appears more than once in the subset")]
    DuplicateMember(usize),
    #[error("subset field `{field}` has {len} entries, expected {expected}")]
    SubsetShape { field: &'static str, len: usize, expected: usize },
    #[error("member index {index} out of range (subset has {size} members)")]
    MemberOutOfRange { index: usize, size: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("vector length {got} does not match expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { what: &'static str, iterations: usize, residual: f64 },
    #[error(
        "scattering eigenpair power iteration stagnated after {iterations} iterations \
         (eigenvalue {lambda}, change {change:e}); leading eigenvalue may be degenerate"
    )]
    EigenStagnation { iterations: usize, lambda: f64, change: f64 },
    #[error(
        "hidden-link series did not reach {series_tol:e} within {terms} terms \
         (last term {last_term:e}, subleading radius estimate {radius})"
    )]
    SeriesNotConverged { terms: usize, series_tol: f64, last_term: f64, radius: f64 },
    #[error("dense computation limited to {cap} nodes, graph has {num_nodes}")]
    DenseCapExceeded { cap: usize, num_nodes: usize },
    #[error("singular matrix in dense solve")]
    Singular,
}
