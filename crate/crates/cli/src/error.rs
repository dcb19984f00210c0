use thiserror::Error;
use zaklat::Error as LibError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Domain(LibError),
    #[error("precondition unmet: {0}")]
    Precondition(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0} check(s)")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Domain(_) | CliError::Io(_) => 2,
            CliError::Config(_) => 3,
            CliError::Precondition(_) => 4,
        }
    }
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::NotH1
            | LibError::NotH2
            | LibError::NotBessel
            | LibError::NotRiesz { .. }
            | LibError::NotOrthonormal { .. }
            | LibError::SingularGram { .. }
            | LibError::NoKernel { .. } => CliError::Precondition(e.to_string()),
            e => CliError::Domain(e),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
