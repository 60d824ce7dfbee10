use thiserror::Error;

/// Crate-wide error type.
///
/// Variants map onto the CLI exit-code contract: `Argument`, `Parse` and
/// `Precondition` are usage errors (exit 2); `Domain`, `Evaluation` and
/// `Numeric` are evaluation errors (exit 3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("domain violation in {func} at value with modulus {modulus:.3e}")]
    Domain { func: &'static str, modulus: f64 },

    #[error("evaluation error at point {point:?}: {msg}")]
    Evaluation { point: Vec<f64>, msg: String },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("structure violation: {0}")]
    Structure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Attach the evaluation point to any error that does not carry one yet.
    pub fn at_point(self, point: &[f64]) -> Error {
        match self {
            Error::Evaluation { .. } | Error::Argument(_) | Error::Parse { .. } => self,
            other => Error::Evaluation { point: point.to_vec(), msg: other.to_string() },
        }
    }

    /// Exit code bucket for the CLI: 2 for usage errors, 3 for evaluation errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) | Error::Parse { .. } | Error::Precondition(_) => 2,
            _ => 3,
        }
    }
}
