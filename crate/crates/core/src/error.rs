use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("peer {peer} is out of range for a population of {n}")]
    PeerOutOfRange { peer: usize, n: usize },

    #[error("peer {0} is not present")]
    AbsentPeer(usize),

    #[error("a peer cannot be paired with itself ({0})")]
    SelfPair(usize),

    #[error("size mismatch: {what} has {got} peers, expected {expected}")]
    SizeMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("configuration is inconsistent: {0}")]
    Inconsistent(String),

    #[error("peer {peer} has {degree} mates; the distance metric is defined for 1-matchings only")]
    NotOneMatching { peer: usize, degree: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Shorthand for [`Error::InvalidParameter`].
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}
