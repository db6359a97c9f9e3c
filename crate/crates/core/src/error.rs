use thiserror::Error;

use crate::instance::ValidationReport;
use crate::lp::simplex::SimplexError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(ValidationReport),

    #[error("embedding is not spherical: |V| - |E| + |F| = {vertices} - {edges} + {faces} != 2")]
    EulerViolation {
        vertices: usize,
        edges: usize,
        faces: usize,
    },

    #[error("instance is flagged non-planar; only the exact solvers accept it")]
    NotPlanar,

    #[error("no path between {s} and {t}")]
    Disconnected { s: usize, t: usize },

    #[error("terminal {vertex} carries colors; normalize the instance first")]
    NotNormalized { vertex: usize },

    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),

    #[error("terminal pair {0} out of range")]
    PairOutOfRange(usize),

    #[error("expected {expected} color weights, got {got}")]
    WeightCount { expected: usize, got: usize },

    #[error("color weights must be finite and nonnegative (color {color}: {value})")]
    BadWeight { color: usize, value: f64 },

    #[error("delta must be positive, got {0}")]
    InvalidDelta(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cutting-plane loop exceeded {limit} cuts")]
    IterationLimit { limit: usize },

    #[error("simplex: {0}")]
    Simplex(#[from] SimplexError),

    #[error("rounded color set does not connect pair {pair}")]
    InvariantViolation { pair: usize },

    #[error("{what}: {got} exceeds limit {limit}")]
    LimitExceeded {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("hypergraph group {group} received no hyperedge")]
    EmptyGroup { group: usize },

    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Usage and input-format errors map to exit code 2, domain failures to 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Io(_) | Error::InvalidConfig(_) => 2,
            _ => 1,
        }
    }

    /// Short machine-readable tag used in JSON error output and the C API.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "PARSE",
            Error::InvalidInstance(_) => "INVALID_INSTANCE",
            Error::EulerViolation { .. } => "EULER_VIOLATION",
            Error::NotPlanar => "NOT_PLANAR",
            Error::Disconnected { .. } => "DISCONNECTED",
            Error::NotNormalized { .. } => "NOT_NORMALIZED",
            Error::VertexOutOfRange(_) | Error::PairOutOfRange(_) => "OUT_OF_RANGE",
            Error::WeightCount { .. } | Error::BadWeight { .. } => "BAD_WEIGHTS",
            Error::InvalidDelta(_) => "INVALID_DELTA",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
            Error::IterationLimit { .. } => "ITERATION_LIMIT",
            Error::Simplex(_) => "SIMPLEX",
            Error::InvariantViolation { .. } => "INVARIANT_VIOLATION",
            Error::LimitExceeded { .. } => "LIMIT_EXCEEDED",
            Error::EmptyGroup { .. } => "EMPTY_GROUP",
            Error::InvalidParams(_) => "INVALID_PARAMS",
            Error::Internal(_) => "INTERNAL",
            Error::Io(_) => "IO",
        }
    }
}
