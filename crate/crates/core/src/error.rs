use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `base^precision` does not exceed the index, so its digits would be lost.
    #[error("index {index} needs more than {precision} digits in base {base}")]
    PrecisionOverflow { index: u64, base: u64, precision: usize },

    /// A stratum level or digit position beyond the stored digits was requested.
    #[error("level {level} exceeds stored precision {precision}")]
    PrecisionShortfall { level: usize, precision: usize },

    #[error("128-bit overflow while computing {0}")]
    Overflow(&'static str),

    #[error("{what} = {value} exceeds the limit {limit}")]
    SizeGuard { what: &'static str, value: u128, limit: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
