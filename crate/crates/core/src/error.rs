use thiserror::Error;

/// Failures while reading graph or membership text.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: malformed entry: {reason}")]
    Entry { line: usize, reason: String },
    #[error("line {line}: index {index} out of declared range 1..={max}")]
    IndexOutOfRange { line: usize, index: u64, max: usize },
    #[error("line {line}: non-finite weight {value}")]
    NonFiniteWeight { line: usize, value: String },
    #[error("line {line}: truncated input, expected {expected} entries but found {found}")]
    Truncated {
        line: usize,
        expected: usize,
        found: usize,
    },
}

/// Failures raised by graph construction and the community routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("malformed graph: {0}")]
    Malformed(String),
    #[error("graph has zero total weight")]
    ZeroTotal,
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge ({u}, {v}) has invalid weight {weight}")]
    InvalidWeight { u: usize, v: usize, weight: f64 },
    #[error("assignment has {got} labels, graph has {expected} vertices")]
    AssignmentLength { expected: usize, got: usize },
    #[error("label {label} of vertex {vertex} out of range [0, {bound})")]
    LabelOutOfRange {
        vertex: usize,
        label: usize,
        bound: usize,
    },
    #[error("dendrogram level {level} has {got} entries, expected {expected}")]
    InconsistentLevel {
        level: usize,
        expected: usize,
        got: usize,
    },
    #[error("dendrogram is empty")]
    EmptyDendrogram,
}

/// Rejected run parameters.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("tolerance must be > 0")]
    Tolerance,
    #[error("tolerance decline factor must be >= 1")]
    DeclineFactor,
    #[error("pass tolerance must be >= 0")]
    PassTolerance,
    #[error("{0} must be >= 1")]
    Cap(&'static str),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
