use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("target {target} out of range for a graph on {vertices} vertices")]
    TargetOutOfRange { target: usize, vertices: usize },
    #[error("vertex {vertex} has out-degree {found}, expected {expected}")]
    OutDegree {
        vertex: usize,
        found: usize,
        expected: usize,
    },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("expected {expected} Casimirs in dimension {dim}, got {found}")]
    CasimirCount {
        dim: usize,
        expected: usize,
        found: usize,
    },
    #[error("underived Casimir a{0} cannot be reduced")]
    UnderivedCasimir(usize),
    #[error("reduced vector field has a nonzero component along the dropped coordinate")]
    NonvanishingReducedComponent,
    #[error("vertex content does not match the graph: {0}")]
    Content(String),
    #[error("infeasible generation constraints: {0}")]
    Infeasible(String),
    #[error("unknown case '{0}'")]
    UnknownCase(String),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
