use alloc::string::String;

/// Errors raised by the core library.
///
/// Strategy indices in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An argument's shape does not fit the game or layout it is used with.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),
    /// A documented precondition on values (not shapes) is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The input is well-formed but cannot come from the assumed structure.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid generator configuration: {0}")]
    Config(String),
    /// A postcondition failed. Indicates a bug, never bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
