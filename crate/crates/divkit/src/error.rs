//! Crate-wide error type.

use thiserror::Error;

use crate::transforms::DecompositionKind;

/// Errors produced by divergence, quadrature and density operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mean domain or violates an operation's
    /// domain preconditions. The message names the offending argument.
    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive integrator exhausted its subdivision budget before the
    /// requested tolerance was met.
    #[error("quadrature did not converge: error estimate {error_estimate:e} after {subdivisions} subdivisions")]
    NonConvergence {
        error_estimate: f64,
        subdivisions: usize,
    },

    /// An integrand or sampled statistic produced NaN or infinity.
    #[error("non-finite evaluation at t = {abscissa}")]
    NonFiniteEvaluation { abscissa: f64 },

    /// The requested quantity genuinely diverges for these inputs
    /// (e.g. a gamma divergence as the first argument approaches zero).
    #[error("result diverges: {0}")]
    Infinite(String),

    /// A custom variance expression evaluated to a non-positive value.
    #[error("variance function is not positive: v({at}) = {value}")]
    NonPositive { at: f64, value: f64 },

    /// Expression or token parse failure; `offset` is a byte offset into the
    /// input text.
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// The variance function does not decompose in the way the requested
    /// identity needs.
    #[error("variance function is not {0:?}-decomposable")]
    NotDecomposable(DecompositionKind),

    /// No analytic route exists for the requested computation.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A Monte Carlo self-diagnostic failed (e.g. sampler mean drift).
    #[error("diagnostics failure: {0}")]
    Diagnostics(String),
}

pub type Result<T> = std::result::Result<T, Error>;
