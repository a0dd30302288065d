use std::path::PathBuf;

/// Exit status of the `sperner` binary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Failure = 1,
    Usage = 2,
    Refused = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Core(#[from] sperner_core::Error),

    #[error("{0}")]
    Failed(String),
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        use sperner_core::Error as E;
        match self {
            LabError::Usage(_) | LabError::Io { .. } | LabError::Format { .. } => ExitCode::Usage,
            LabError::Failed(_) => ExitCode::Failure,
            LabError::Core(e) => match e {
                E::Feasibility(_) | E::Construction { .. } => ExitCode::Refused,
                E::Invariant(_) => ExitCode::Failure,
                E::LatticeSize { .. }
                | E::VertexSet(_)
                | E::OutOfRange { .. }
                | E::Parameter(_)
                | E::Precondition(_) => ExitCode::Usage,
            },
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
