use thiserror::Error;

/// Errors raised by the library. Everything except [`Error::Io`] is an
/// input-validation failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: k={left} vs k={right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("shape mismatch in `{field}`: {detail}")]
    ShapeMismatch { field: &'static str, detail: String },

    #[error("invalid `{field}`: {detail}")]
    Invalid { field: String, detail: String },

    #[error("`{what}` is not S_k-closed")]
    NotSymmetric { what: &'static str },

    #[error("cap exceeded for {what}: {value} > {limit}")]
    CapExceeded {
        what: &'static str,
        value: u128,
        limit: u128,
    },

    #[error("{0} is undefined")]
    Undefined(&'static str),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn cap(what: &'static str, value: u128, limit: u128) -> Self {
        Error::CapExceeded { what, value, limit }
    }

    /// True when the error is caused by bad input rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

pub(crate) fn same_arity(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::ArityMismatch { left, right })
    }
}
