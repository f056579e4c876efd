use thiserror::Error;

use crate::lattice::Divisibility;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The genus/divisibility pair violates a standing hypothesis.
    #[error("inadmissible genus {genus}: {constraint}")]
    InadmissibleGenus {
        genus: u64,
        constraint: &'static str,
    },

    /// An operation that only makes sense for one divisibility case was
    /// called on the other.
    #[error("{op} is only defined for {expected}")]
    WrongCase {
        op: &'static str,
        expected: Divisibility,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
