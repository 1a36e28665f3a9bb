use thiserror::Error;

/// Errors produced by the solver layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a domain precondition (non-positive mass, q ≤ 0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to converge or lost accuracy.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The eigenvalue enumeration lost track of a level.
    #[error("missed level in channel l={l}: expected node count {expected}, found {found} at E={energy}")]
    MissedLevel {
        l: u32,
        expected: usize,
        found: usize,
        energy: f64,
    },

    /// A cache file could not be read back (corruption, version or key mismatch).
    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
