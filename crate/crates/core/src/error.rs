use thiserror::Error;

use crate::factor::FactorError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A value left the range of the fixed-width policy. Carries the index
    /// being computed when it is known.
    #[error("arithmetic overflow under the fixed-width integer policy{}", .0.as_ref().map(|n| format!(" at n = {n}")).unwrap_or_default())]
    Overflow(Option<String>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// `a = n + 2` (or `a = n`): consecutive integers stay coprime, so every
    /// later gcd is 1.
    #[error("no nontrivial gcd ever follows state ({n}, {a})")]
    NoNontrivialGcd { n: String, a: String },
    #[error("internal invariant broken: {0}")]
    Invariant(String),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

impl Error {
    pub fn overflow() -> Self {
        Error::Overflow(None)
    }

    /// Attaches the index being computed to an overflow that lacks one.
    pub fn at_index(self, n: impl ToString) -> Self {
        match self {
            Error::Overflow(None) => Error::Overflow(Some(n.to_string())),
            other => other,
        }
    }
}
