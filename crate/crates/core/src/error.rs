//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Broad failure class, used by callers to pick an exit code or recovery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed textual input.
    Parse,
    /// Input violates a documented precondition or invariant.
    Domain,
    /// Input is structurally fine but beyond a configured exact-computation cap.
    Capability,
    /// An internal postcondition failed; always a bug witness.
    Contract,
}

/// Error with a classification and a human-readable message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Error {
    kind: ErrorKind,
    message: String,
}

impl Error {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Error {
            kind,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Error::new(ErrorKind::Parse, message)
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Error::new(ErrorKind::Domain, message)
    }

    pub fn capability(message: impl Into<String>) -> Self {
        Error::new(ErrorKind::Capability, message)
    }

    pub fn contract(message: impl Into<String>) -> Self {
        Error::new(ErrorKind::Contract, message)
    }

    pub fn kind(&self) -> ErrorKind {
        self.kind
    }

    pub fn message(&self) -> &str {
        &self.message
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            ErrorKind::Parse => "parse error",
            ErrorKind::Domain => "domain error",
            ErrorKind::Capability => "capability error",
            ErrorKind::Contract => "contract error",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
