use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An enumeration would exceed its configured ceiling.
    #[error("size ceiling exceeded: {what} = {value} > {ceiling}")]
    Size {
        what: &'static str,
        value: usize,
        ceiling: usize,
    },
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A cumulant of order beyond the stored determining sequence was requested.
    #[error("cumulant order {order} exceeds truncation K_max = {k_max}")]
    Truncation { order: usize, k_max: usize },
    #[error("capability unavailable: {0}")]
    Capability(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
