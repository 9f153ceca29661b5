use thiserror::Error;

/// Crate-wide error type.
///
/// The variants mirror the failure classes surfaced to users of the CLI:
/// configuration problems (bad sizes, parameters out of range), domain
/// violations (structurally valid inputs outside an operation's domain, such
/// as a latent value that would overflow `exp`), and numerical failures
/// (solver breakdown, non-finite intermediates).
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: wrong sizes, parameters outside their legal range.
    #[error("configuration error: {0}")]
    Config(String),
    /// Structurally valid input outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Numerical breakdown: singular or hopelessly ill-conditioned systems,
    /// non-finite values where finite ones are required.
    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
