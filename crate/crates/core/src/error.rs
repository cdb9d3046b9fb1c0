use thiserror::Error;

/// Failure categories shared by every module.
///
/// `Range` covers inputs that fall outside what the data or the integer
/// types can address; `Contract` covers calls whose preconditions are not
/// met; `Budget` covers enumerations that would exceed an explicit limit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("range error: {0}")]
    Range(String),
    #[error("contract error: {0}")]
    Contract(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

impl Error {
    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Range(_) => "range",
            Error::Contract(_) => "contract",
            Error::Budget(_) => "budget",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
