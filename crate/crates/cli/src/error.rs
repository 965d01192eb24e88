use curveball::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub const USAGE: u8 = 1;
    pub const DATA: u8 = 2;
    pub const INFEASIBLE: u8 = 3;

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Engine(Error::InvalidParameter(_)) => Self::USAGE,
            CliError::Engine(Error::NotGraphical(_) | Error::Infeasible(_)) => Self::INFEASIBLE,
            _ => Self::DATA,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
