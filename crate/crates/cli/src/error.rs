use ikwave_core::evolution::RunAbort;
use ikwave_core::IkError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver failure: {0}")]
    Solver(IkError),

    #[error("guard abort: {0}")]
    Guard(Box<RunAbort>),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Guard(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<IkError> for CliError {
    fn from(e: IkError) -> Self {
        match e {
            IkError::BadExponents(_)
            | IkError::InvalidDomain(_)
            | IkError::InvalidConfig(_)
            | IkError::DepthCollapse { .. }
            | IkError::Format(_)
            | IkError::Json(_) => CliError::Config(e.to_string()),
            IkError::Io(source) => CliError::Io {
                path: "<stream>".into(),
                source,
            },
            other => CliError::Solver(other),
        }
    }
}

impl From<Box<RunAbort>> for CliError {
    fn from(abort: Box<RunAbort>) -> Self {
        if abort.is_guard() {
            CliError::Guard(abort)
        } else {
            CliError::from(abort.error)
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
