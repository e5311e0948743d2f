use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates a documented constraint. The message
    /// names the offending key and the bound it breaks.
    #[error("config error: {0}")]
    Config(String),
    /// An argument lies outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical procedure failed (singular factorization, quadrature
    /// that did not converge, ...). The message carries diagnostics.
    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
