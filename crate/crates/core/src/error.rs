use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Arguments violate an operation's preconditions.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two objects that must share a shape (site count, local dimension,
    /// matrix size) do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A dense object would exceed the configured size budget.
    #[error("{what} needs {required} amplitudes, limit is {limit}")]
    ResourceLimit {
        what: String,
        required: u128,
        limit: u128,
    },

    /// A decomposition failed or produced values outside the admissible
    /// range (e.g. a clearly negative eigenvalue of a density matrix).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    /// The superposition of translates interfered to the zero vector.
    #[error("superposition of translates vanishes identically")]
    VanishingSuperposition,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
