use thiserror::Error;

/// Errors raised while building models or running inference.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        got: usize,
    },

    #[error("non-positive entry in {what}: {value}")]
    NonPositiveEntry { what: String, value: f64 },

    #[error("non-finite entry in {what}: {value}")]
    NonFiniteEntry { what: String, value: f64 },

    #[error("negative entry in {what}: {value}")]
    NegativeEntry { what: String, value: f64 },

    #[error("support violation at index {index}: q is zero where p is positive")]
    SupportViolation { index: usize },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("duplicate edge between variables {0} and {1}")]
    DuplicateEdge(usize, usize),

    #[error("pairwise factor endpoints must be distinct (got {0}, {0})")]
    SelfLoop(usize),

    #[error("dangling variable id {id} (graph has {n_vars} variables)")]
    DanglingVariable { id: usize, n_vars: usize },

    #[error("alphabet index {index} out of range for variable {var}")]
    IndexOutOfRange { var: usize, index: usize },

    #[error("factor {factor} is not incident to variable {var}")]
    NotIncident { factor: usize, var: usize },

    #[error("enumeration too large: {states} joint states exceeds limit {limit}")]
    EnumerationTooLarge { states: f64, limit: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cholesky factorization failed: matrix is not numerically positive definite")]
    Factorization,

    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
