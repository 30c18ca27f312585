use thiserror::Error;

use crate::diagram::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("level {requested} requested but the diagram is a truncation of depth {depth}")]
    DepthExceedsTruncation { requested: usize, depth: usize },

    #[error("operation needs an infinite (eventually periodic) diagram")]
    FiniteDiagram,

    #[error("invalid diagram: {0}")]
    InvalidDiagram(ValidationReport),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("paths are incomparable: {0}")]
    IncomparablePaths(String),

    #[error("path is maximal in its fiber")]
    FiberMaximal,

    #[error("path is minimal in its fiber")]
    FiberMinimal,

    #[error("point is outside the domain: {0}")]
    Domain(String),

    #[error("depth cap {cap} exceeded before the computation stabilised")]
    CapExceeded { cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate diagram: {0}")]
    DegenerateDiagram(String),

    #[error("Kakutani-Rokhlin conditions failed: {0}")]
    KrConditionsFailed(String),

    #[error("partition sequence is not nested: {0}")]
    NotNested(String),

    #[error("malformed input at line {line}, column {column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid telescoping: {0}")]
    InvalidTelescoping(String),

    #[error("path count overflow at level {level}")]
    Overflow { level: usize },
}
