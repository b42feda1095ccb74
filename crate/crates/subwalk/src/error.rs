//! Error taxonomy shared by the library, the CLI, and the C ABI.
//!
//! Errors fall into two exit-code families:
//! * configuration / domain / validation problems (bad parameters, inputs
//!   outside an operation's precondition) map to process exit code 2;
//! * numeric / capability problems (non-convergence, requests a backend
//!   cannot honour) map to process exit code 3.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failures surfaced by the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: parameter outside its documented range,
    /// malformed CLI/config input, inconsistent options.
    #[error("config error: {0}")]
    Config(String),

    /// Input outside an operation's domain (preconditions on arguments).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural check failed while deriving quantities (e.g. a fitted
    /// scaling exponent escaped its admissible range).
    #[error("validation error: {0}")]
    Validation(String),

    /// The requested operation is not supported for this input kind.
    #[error("capability error: {0}")]
    Capability(String),

    /// A numerical routine failed to converge or left its accuracy budget.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Filesystem failure while reading or writing artifacts.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for usage/validation problems,
    /// 3 for numeric/capability problems (and I/O).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Validation(_) => 2,
            Error::Capability(_) | Error::Numeric(_) | Error::Io(_) => 3,
        }
    }
}
