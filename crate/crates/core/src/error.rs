use thiserror::Error;

/// Errors produced by the sieve, summation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the supported domain (for example `x = 0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A table or cache would exceed the configured memory cap.
    #[error(
        "sizing error: {what} needs {requested} bytes, exceeding the memory cap of {cap} bytes"
    )]
    Sizing {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    /// A lookup past the end of a sieved table.
    #[error("coverage error: {what} table covers 1..={limit}, but {needed} is required")]
    Coverage {
        what: &'static str,
        needed: u64,
        limit: u64,
    },

    /// Exact integer arithmetic left the range of its accumulator.
    #[error("overflow in {0}")]
    Overflow(&'static str),

    /// Caller-side precondition failed (sample counts, spans, ...).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The least-squares basis is rank deficient or too poorly conditioned.
    #[error("ill-conditioned fit basis: condition number {condition:e} exceeds {limit:e}")]
    IllConditioned { condition: f64, limit: f64 },
}

impl Error {
    /// True for errors caused by bad caller input rather than by the computation itself.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Precondition(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
