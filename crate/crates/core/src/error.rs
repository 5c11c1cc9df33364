use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("graph is disconnected ({unreachable} nodes unreachable from node {root})")]
    Disconnected { root: usize, unreachable: usize },

    #[error("node {0} has no incident edges or self-loops")]
    IsolatedNode(usize),

    #[error("graph is not regular: slot counts range over [{min}, {max}]")]
    NotRegular { min: usize, max: usize },

    #[error("graph already carries self-loops")]
    HasSelfLoops,

    #[error("eigensolver failed to converge for eigenvalue {index} after {iterations} iterations")]
    EigenNoConvergence { index: usize, iterations: usize },

    #[error(
        "mixing tolerance {tolerance} not reached within {t_max} steps (deviation {deviation})"
    )]
    MixingCapExceeded {
        t_max: usize,
        tolerance: f64,
        deviation: f64,
    },

    #[error("exhaustive budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("walk {walk} does not cover the graph ({reached} of {node_count} nodes reached)")]
    WalkNotCovering {
        walk: usize,
        reached: usize,
        node_count: usize,
    },

    #[error("invalid tree packing: {0}")]
    InvalidPacking(String),

    #[error(
        "edge ({u}, {v}) over-subscribed in phase {phase}: {load} messages for {capacity} slots"
    )]
    Oversubscribed {
        u: usize,
        v: usize,
        phase: usize,
        load: usize,
        capacity: usize,
    },

    #[error("message {0} is held by more than one node")]
    OverlappingHoldings(usize),

    #[error("sub-node {subnode} exhausted {cap} retries without a successful walk")]
    EmbeddingFailed { subnode: usize, cap: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
