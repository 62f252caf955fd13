use alloc::string::String;

/// Errors raised by the clustering core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("node {node} is out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("invalid weight {weight} at ({row}, {col})")]
    InvalidWeight { row: usize, col: usize, weight: f64 },

    #[error("views disagree on node count: expected {expected}, found {found}")]
    NodeCountMismatch { expected: usize, found: usize },

    #[error("expected {expected} per-view values, found {found}")]
    ViewCountMismatch { expected: usize, found: usize },

    #[error("clustering covers {found} nodes, expected {expected}")]
    LabelCountMismatch { expected: usize, found: usize },

    #[error("clusterings are defined over different objects")]
    ObjectSetMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A value that the algorithms guarantee never appears (e.g. a
    /// non-positive edge propensity) showed up anyway.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
