use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// `Precondition` and `Budget` correspond to caller mistakes (bad parameters,
/// enumeration limits); everything else is an I/O or data problem.
#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("malformed record data: {0}")]
    Record(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
