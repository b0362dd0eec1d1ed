use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The CLI maps [`Error::Validation`] (and friends describing bad input) to
/// exit code 2 and [`Error::NonConvergence`] to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("point {what} lies outside the admissible domain: {detail}")]
    OutOfDomain { what: &'static str, detail: String },

    #[error("numerical procedure did not converge: {0}")]
    NonConvergence(String),

    #[error("unknown entry law `{0}`")]
    UnknownLaw(String),

    #[error("matrix is not Hermitian: relative asymmetry {0:e}")]
    NotHermitian(f64),

    #[error("eigenvectors were not computed for this sample")]
    MissingEigenvectors,

    #[error("malformed matrix container: {0}")]
    Container(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
