use thiserror::Error;

/// Errors shared across the symbolic, numeric and graph layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("reduction budget exceeded while rewriting the word `{word}`")]
    ReductionBudgetExceeded { word: String },

    #[error("parse error at byte {position}: {message}")]
    ParseError { position: usize, message: String },

    #[error("unknown generator `{name}` at byte {position}")]
    UnknownGenerator { name: String, position: usize },

    #[error("identity `{name}` failed to reduce to zero; residue: {residue}")]
    IdentityFailed { name: String, residue: String },

    #[error("operator is not invertible (smallest singular value {sigma_min:e} below tolerance {tol:e})")]
    NotInvertible { sigma_min: f64, tol: f64 },

    #[error("operator is not positive semidefinite (smallest eigenvalue {lambda_min:e})")]
    NotPositive { lambda_min: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported graph: {0}")]
    UnsupportedGraph(String),

    #[error("unsupported presentation: {0}")]
    UnsupportedPresentation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
