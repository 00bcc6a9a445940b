use alloc::string::String;

/// Errors raised by every layer of the library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("sort error: {0}")]
    Sort(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("inconsistent update set")]
    InconsistentUpdateSet,
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("ill-formed instantiation: {0}")]
    IllFormedInstantiation(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
