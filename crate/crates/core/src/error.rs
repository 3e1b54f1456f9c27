use thiserror::Error;

/// Errors raised by game construction, evaluation, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("formulation mismatch: {0}")]
    Formulation(String),

    #[error("not ergodic: {0}")]
    Ergodicity(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("size bound exceeded: {0}")]
    Size(String),

    #[error("policy for player {player} is not in its restricted space")]
    NotInSpace { player: usize },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("linear system is singular")]
    Singular,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
