//! Exact and asymptotic statistics of the divisor function.
//!
//! * [`sieve`]: pointwise tables of μ, d, d_k and d², plus identity checks.
//! * [`summatory`]: exact `Σ d_k(n)` and `Σ d(n)²`, by sieve and by sublinear methods.
//! * [`analysis`]: main terms, error envelopes and log-polynomial fits.
//! * [`report`]: JSON/CSV output shapes.

pub mod analysis;
pub mod arith;
pub mod error;
pub mod report;
pub mod sieve;
pub mod summatory;

pub use error::{Error, Result};
