//! Simulation of decaying two-level multipartite quantum systems and the
//! contextuality / Bell criteria that survive the decay.
//!
//! The crate is organized around a small dense complex linear algebra core
//! ([`linalg`]), closed-form Kraus channels for decaying two-level particles
//! together with a Lindblad ODE integrator used as a correctness oracle
//! ([`evolution`]), measurement configurations ([`observables`]), the
//! criterion evaluators ([`inequalities`]), a per-time-point pentagram and
//! CHSH-setting optimizer ([`optimizer`]) and the `dctx` command line
//! frontend ([`cli`]).

pub mod cli;
pub mod evolution;
pub mod inequalities;
pub mod linalg;
pub mod observables;
pub mod optimizer;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix expected to be Hermitian exceeded the tolerance.
    #[error("matrix is not Hermitian: max |A - A^dag| = {residual:.3e} > tol {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    /// A density block violated one of its defining properties.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Operand dimensions do not match.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Evolution was requested for a negative time.
    #[error("negative time: t = {0}")]
    NegativeTime(f64),

    /// A random pentagram draw failed to produce a valid configuration.
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    /// An operator expected to be a projector is not one.
    #[error("not a projector: {0}")]
    NotAProjector(String),

    /// A scalar argument fell outside its documented range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// Command line / configuration usage error.
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
