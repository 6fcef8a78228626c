use thiserror::Error;

/// Everything that can go wrong while building, verifying or reporting a dilation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("exceptional-point singularity at alpha = {alpha}: the coupling operator diverges")]
    ExceptionalPoint { alpha: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("post-selection failed: retained component has norm {norm:e}")]
    PostSelection { norm: f64 },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Dimension(_)
            | Error::Contract(_)
            | Error::NotPsd { .. }
            | Error::DegenerateInput(_)
            | Error::Serialization(_) => 2,
            Error::Verification(_) | Error::PostSelection { .. } => 3,
            Error::ExceptionalPoint { .. } => 4,
            Error::Io(_) => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
