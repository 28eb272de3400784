use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    InvalidVertex { vertex: usize, count: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("ball of radius {radius} around {center} reaches incomplete vertex {vertex} at distance {distance}")]
    UnreliableBall {
        center: usize,
        radius: usize,
        vertex: usize,
        distance: usize,
    },

    #[error("evaluation requested at boundary vertex {0}")]
    BoundaryEvaluation(usize),

    #[error("degree of boundary vertex {0} is unknown, diagonal entry undefined in this potential mode")]
    UnknownDegree(usize),

    #[error("vertex budget exceeded: {requested} > {budget}")]
    VertexBudget { requested: usize, budget: usize },

    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),

    #[error("malformed chain block: {0}")]
    MalformedBlock(String),

    #[error("graph too small: {0}")]
    GraphTooSmall(String),

    #[error("m-function evaluated on the spectrum at z = {re} + {im}i")]
    OnSpectrum { re: f64, im: f64 },

    #[error("pole of m-function at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("degenerate linear system: {0}")]
    Degenerate(String),

    #[error("dense eigensolver failed: {0}")]
    Dense(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
