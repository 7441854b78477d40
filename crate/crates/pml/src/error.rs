use pml_core::PmlError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    /// Unreadable input file or bad flag combination.
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] PmlError),
}

impl Error {
    /// Input problems exit with 2, everything else with 1.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Parse(_) => true,
            Error::Core(e) => matches!(e, PmlError::Invalid(_) | PmlError::TooLarge(_) | PmlError::Infeasible(_)),
            Error::Io(_) => false,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}
