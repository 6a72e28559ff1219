use alloc::string::String;

/// Errors raised by the core library.
///
/// The variants follow the failure classes the harness maps onto exit codes:
/// bad inputs (`Domain`, `Config`), numerical breakdown (`Numeric`), size
/// limits (`Resource`) and codec framing problems (`Framing`, `Role`).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("framing error: {0}")]
    Framing(String),
    #[error("session role mismatch: {0}")]
    Role(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn framing(msg: impl Into<String>) -> Self {
        Error::Framing(msg.into())
    }
}
