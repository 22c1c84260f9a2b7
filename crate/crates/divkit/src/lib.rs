//! Divergences and related quantities of exponential dispersion models,
//! driven entirely by variance functions.
//!
//! Given a positive variance function `v` on a mean domain, this crate
//! computes the canonical parameter, cumulant and dual cumulant, the beta
//! and alpha divergences, the unit quasi-log-likelihood and the unit
//! deviance as definite integrals of `1/v`, `t/v` and `(x - t)/v`. Named
//! families (Tweedie powers, Bernoulli, negative binomial, hyperbolic
//! secant) ship closed forms; everything else goes through an adaptive
//! Gauss-Kronrod integrator, which doubles as the oracle the closed forms
//! are verified against.
//!
//! ```
//! use divkit::divergence::beta_divergence;
//! use divkit::varfun::VarianceFunction;
//!
//! // Poisson: v(mu) = mu, so d_beta(x, mu) = x ln(x/mu) - x + mu.
//! let poisson = VarianceFunction::tweedie(1.0);
//! let d = beta_divergence(&poisson, 2.0, 1.0).unwrap();
//! assert!((d.value - (2.0 * std::f64::consts::LN_2 - 1.0)).abs() < 1e-12);
//! ```
//!
//! The numeric core is generic over [`real::Real`] (`f32` or `f64`);
//! the aliases below fix the common `f64` case.

// Validation uses negated comparisons (`!(x > 0)`) on purpose: they reject
// NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed;
pub mod density;
pub mod divergence;
pub mod error;
pub mod quadrature;
pub mod real;
pub mod report;
pub mod special;
pub mod stats;
pub mod transforms;
pub mod varfun;

pub use error::{Error, Result};
pub use real::Real;

/// `f64` aliases for the main public types.
pub type MeanDomain64 = varfun::MeanDomain<f64>;
pub type VarianceFunction64 = varfun::VarianceFunction<f64>;
pub type VfExpression64 = varfun::VfExpression<f64>;
pub type QuadratureSpec64 = quadrature::QuadratureSpec<f64>;
pub type QuadratureResult64 = quadrature::QuadratureResult<f64>;
pub type DivergenceResult64 = divergence::DivergenceResult<f64>;
pub type LikelihoodValue64 = divergence::LikelihoodValue<f64>;
pub type CumulantPair64 = divergence::CumulantPair<f64>;
pub type EvalOptions64 = divergence::EvalOptions<f64>;
pub type PropertyReport64 = report::PropertyReport<f64>;
pub type DispersionModel64 = density::DispersionModel<f64>;
