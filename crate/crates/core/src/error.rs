use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed device, circuit, observable or parameter.
    #[error("validation error: {0}")]
    Validation(String),

    /// Request exceeds the configured memory budget.
    #[error("resource error: {what} needs {needed} bytes, budget is {budget} bytes")]
    Resource {
        what: String,
        needed: u128,
        budget: u128,
    },

    /// A gate outside the Clifford group reached a stabilizer routine.
    #[error("non-Clifford gate at op {index}: {detail}")]
    NonClifford { index: usize, detail: String },

    /// Structured-text parse failure.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// A numerical routine could not produce a result.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
