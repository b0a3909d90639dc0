use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the domain where the operation is defined.
    #[error("invalid {name}: {reason}")]
    Domain { name: &'static str, reason: String },

    /// An index or threshold lies outside the representable/valid range.
    #[error("{what} = {value} is out of range ({limit})")]
    Range {
        what: &'static str,
        value: f64,
        limit: String,
    },

    /// The request would need more memory or work than allowed.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("insufficient data for fit: {usable} usable points, need at least {needed}")]
    InsufficientData { usable: usize, needed: usize },

    #[error("threshold grids do not match: {0}")]
    GridMismatch(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }
}
