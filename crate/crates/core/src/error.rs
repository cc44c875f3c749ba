use thiserror::Error;

use crate::codec::format::DcbError;
use crate::imageio::PgmError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Pgm(#[from] PgmError),

    #[error(transparent)]
    Dcb(#[from] DcbError),

    /// Serial and parallel (or repeated) runs of the pipeline disagreed.
    #[error("determinism violation: {0}")]
    Determinism(String),

    /// A CORDIC row scored noticeably better than the exact transform it approximates.
    #[error("backend ordering violated: {0}")]
    BackendOrdering(String),

    #[error("report serialization failed: {0}")]
    Report(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
