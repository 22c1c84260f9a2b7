//! The integral-form quantities induced by a variance function: canonical
//! parameter, cumulant, dual cumulant, beta and alpha divergences,
//! quasi-log-likelihood and unit deviance.
//!
//! Every operation is a definite integral of `1/v`, `t/v` or `(x - t)/v` and
//! is computed by adaptive quadrature, with dispatch to the closed forms of
//! [`crate::closed`] where the family registry provides one. Results record
//! which path ran so callers can force quadrature and compare the two.

use crate::closed;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::real::Real;
use crate::varfun::VarianceFunction;

/// How a divergence value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// A nonnegative divergence value with provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceResult<T> {
    pub value: T,
    pub method: Method,
    /// Zero for closed forms; otherwise the quadrature error estimate,
    /// enlarged by any clamped-away negative tail.
    pub error_estimate: T,
}

impl<T: Real> DivergenceResult<T> {
    fn closed(value: T) -> Self {
        Self {
            value,
            method: Method::ClosedForm,
            error_estimate: T::zero(),
        }
    }
}

/// Unit quasi-log-likelihood value together with the base point it was
/// integrated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodValue<T> {
    pub value: T,
    pub base: T,
}

/// Canonical parameter, cumulant and dual cumulant at one mean value,
/// sharing a base point. Satisfies `phi = mu * theta - psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantPair<T> {
    pub theta: T,
    pub psi: T,
    pub phi: T,
    pub base: T,
}

/// Evaluation controls shared by the divergence operations.
#[derive(Debug, Clone)]
pub struct EvalOptions<T> {
    pub quad: QuadratureSpec<T>,
    /// Skip closed forms even where the registry has one (used to compare
    /// the two routes in tests).
    pub force_quadrature: bool,
}

impl<T: Real> Default for EvalOptions<T> {
    fn default() -> Self {
        Self {
            quad: QuadratureSpec::default(),
            force_quadrature: false,
        }
    }
}

impl<T: Real> EvalOptions<T> {
    pub fn quadrature_only() -> Self {
        Self {
            quad: QuadratureSpec::default(),
            force_quadrature: true,
        }
    }
}

fn integrate_converged<T: Real>(
    spec: &QuadratureSpec<T>,
    a: T,
    b: T,
    f: impl FnMut(T) -> Result<T>,
) -> Result<(T, T)> {
    let r = integrate(spec, a, b, f)?.require_converged()?;
    Ok((r.value, r.error_estimate))
}

/// Clamps a tiny negative quadrature result (within `abs_tol`) to zero,
/// folding the discarded magnitude into the error estimate. Genuine
/// violations are passed through untouched.
fn clamp_tiny_negative<T: Real>(value: T, error: T, abs_tol: T) -> (T, T) {
    if value < T::zero() && -value <= abs_tol {
        (T::zero(), error.max(-value))
    } else {
        (value, error)
    }
}

/// Canonical parameter `theta(mu)`: integral of `1/v` from `base` to `mu`.
pub fn canonical_theta<T: Real>(vf: &VarianceFunction<T>, mu: T, base: T) -> Result<T> {
    canonical_theta_with(vf, mu, base, &EvalOptions::default())
}

pub fn canonical_theta_with<T: Real>(
    vf: &VarianceFunction<T>,
    mu: T,
    base: T,
    opts: &EvalOptions<T>,
) -> Result<T> {
    vf.require_interior("mu", mu)?;
    vf.require_interior("base", base)?;
    let (value, _) = integrate_converged(&opts.quad, base, mu, |t| Ok(T::one() / vf.eval(t)?))?;
    Ok(value)
}

/// Cumulant `psi(theta(mu))`: integral of `t/v(t)` from `base` to `mu`.
pub fn cumulant_psi<T: Real>(vf: &VarianceFunction<T>, mu: T, base: T) -> Result<T> {
    cumulant_psi_with(vf, mu, base, &EvalOptions::default())
}

pub fn cumulant_psi_with<T: Real>(
    vf: &VarianceFunction<T>,
    mu: T,
    base: T,
    opts: &EvalOptions<T>,
) -> Result<T> {
    vf.require_interior("mu", mu)?;
    vf.require_interior("base", base)?;
    let (value, _) = integrate_converged(&opts.quad, base, mu, |t| Ok(t / vf.eval(t)?))?;
    Ok(value)
}

/// Dual cumulant `phi(mu)`: integral of `(mu - t)/v(t)` from `base` to `mu`.
/// Convex, nonnegative, and zero at `mu = base`.
pub fn dual_cumulant_phi<T: Real>(vf: &VarianceFunction<T>, mu: T, base: T) -> Result<T> {
    dual_cumulant_phi_with(vf, mu, base, &EvalOptions::default())
}

pub fn dual_cumulant_phi_with<T: Real>(
    vf: &VarianceFunction<T>,
    mu: T,
    base: T,
    opts: &EvalOptions<T>,
) -> Result<T> {
    vf.require_interior("mu", mu)?;
    vf.require_interior("base", base)?;
    if !opts.force_quadrature {
        if let crate::varfun::Family::TweediePower(p) = vf.family() {
            let (phi1, phi0) = closed::tweedie_phi_parts(*p, mu, base)?;
            return Ok(phi1 + phi0);
        }
    }
    let (value, error) = integrate_converged(&opts.quad, base, mu, |t| Ok((mu - t) / vf.eval(t)?))?;
    let (value, _) = clamp_tiny_negative(value, error, opts.quad.abs_tol);
    Ok(value)
}

/// Canonical parameter, cumulant and dual cumulant at `mu`, one call.
pub fn cumulants<T: Real>(vf: &VarianceFunction<T>, mu: T, base: T) -> Result<CumulantPair<T>> {
    cumulants_with(vf, mu, base, &EvalOptions::default())
}

pub fn cumulants_with<T: Real>(
    vf: &VarianceFunction<T>,
    mu: T,
    base: T,
    opts: &EvalOptions<T>,
) -> Result<CumulantPair<T>> {
    Ok(CumulantPair {
        theta: canonical_theta_with(vf, mu, base, opts)?,
        psi: cumulant_psi_with(vf, mu, base, opts)?,
        phi: dual_cumulant_phi_with(vf, mu, base, opts)?,
        base,
    })
}

/// Beta divergence `d_beta(x, mu)`: integral of `(x - t)/v(t)` from `mu`
/// to `x`. No base point is involved.
///
/// Boundary `x` values are admitted only on the closed-form path and only
/// where the analytic limit is finite (Tweedie x = 0 below p = 2, Bernoulli
/// x in {0, 1}); the quadrature path requires strict interiority.
pub fn beta_divergence<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
) -> Result<DivergenceResult<T>> {
    beta_divergence_with(vf, x, mu, &EvalOptions::default())
}

pub fn beta_divergence_with<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
    opts: &EvalOptions<T>,
) -> Result<DivergenceResult<T>> {
    if !opts.force_quadrature {
        if let Some(result) = closed::beta_closed_form(vf.family(), x, mu) {
            return result.map(DivergenceResult::closed);
        }
    }
    vf.require_interior("x", x)?;
    vf.require_interior("mu", mu)?;
    let (raw, error) = integrate_converged(&opts.quad, mu, x, |t| Ok((x - t) / vf.eval(t)?))?;
    let (value, error) = clamp_tiny_negative(raw, error, opts.quad.abs_tol);
    Ok(DivergenceResult {
        value,
        method: Method::Quadrature,
        error_estimate: error,
    })
}

fn check_alpha_args<T: Real>(vf: &VarianceFunction<T>, x: T, mu: T) -> Result<T> {
    if !(mu > T::zero()) {
        return Err(Error::Domain(format!(
            "mu = {mu} must be positive for alpha divergence"
        )));
    }
    vf.require_interior("x", x)?;
    vf.require_interior("mu", mu)?;
    vf.require_interior("alpha base point 1", T::one())
        .map_err(|_| {
            Error::Domain("alpha divergence needs 1 strictly inside the mean domain".into())
        })?;
    let ratio = x / mu;
    vf.require_interior("x/mu", ratio)?;
    Ok(ratio)
}

/// Alpha divergence `d_alpha(x, mu) = mu * phi(x/mu)` with the base fixed
/// at 1, i.e. `mu` times the integral of `(x/mu - t)/v(t)` from 1 to `x/mu`.
///
/// Families whose mean domain does not strictly contain 1 (Bernoulli) are
/// rejected: `phi(1) = 0` is structural to the f-divergence construction.
pub fn alpha_divergence<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
) -> Result<DivergenceResult<T>> {
    alpha_divergence_with(vf, x, mu, &EvalOptions::default())
}

pub fn alpha_divergence_with<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
    opts: &EvalOptions<T>,
) -> Result<DivergenceResult<T>> {
    let ratio = check_alpha_args(vf, x, mu)?;
    if !opts.force_quadrature {
        if let Some(result) = closed::alpha_closed_form(vf.family(), x, mu) {
            return result.map(DivergenceResult::closed);
        }
    }
    let (raw, error) = integrate_converged(&opts.quad, T::one(), ratio, |t| {
        Ok((ratio - t) / vf.eval(t)?)
    })?;
    let (value, error) = clamp_tiny_negative(mu * raw, mu * error, opts.quad.abs_tol);
    Ok(DivergenceResult {
        value,
        method: Method::Quadrature,
        error_estimate: error,
    })
}

/// Alpha divergence through the cumulant route
/// `d_alpha(x, mu) = integral over t in [mu, x] of psi(theta(x/t))`,
/// where the inner cumulant is itself a quadrature with its relative
/// tolerance relaxed tenfold. Serves as a cross-check oracle for
/// [`alpha_divergence`]; always quadrature.
pub fn alpha_divergence_via_cumulant<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
) -> Result<DivergenceResult<T>> {
    alpha_divergence_via_cumulant_with(vf, x, mu, &EvalOptions::default())
}

pub fn alpha_divergence_via_cumulant_with<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
    opts: &EvalOptions<T>,
) -> Result<DivergenceResult<T>> {
    check_alpha_args(vf, x, mu)?;
    if !(x > T::zero()) {
        // x/t must stay inside the domain as t sweeps [mu, x]; a sign
        // change would drive the ratio through infinity.
        return Err(Error::Domain(format!(
            "x = {x} must be positive for the cumulant form of alpha divergence"
        )));
    }
    let inner_spec = opts.quad.relax_rel(T::cast(10.0));
    let mut worst_inner = T::zero();
    let outer = integrate(&opts.quad, mu, x, |t| {
        let ratio = x / t;
        vf.require_interior("x/t", ratio)?;
        let inner = integrate(&inner_spec, T::one(), ratio, |s| Ok(s / vf.eval(s)?))?
            .require_converged()?;
        worst_inner = worst_inner.max(inner.error_estimate);
        Ok(inner.value)
    })?
    .require_converged()?;
    let error = outer.error_estimate + worst_inner * (x - mu).abs();
    let (value, error) = clamp_tiny_negative(outer.value, error, opts.quad.abs_tol);
    Ok(DivergenceResult {
        value,
        method: Method::Quadrature,
        error_estimate: error,
    })
}

/// Unit quasi-log-likelihood `L(x | mu)`: integral of `(x - t)/v(t)` from
/// `base` to `mu`. The difference `L(x|x) - L(x|mu)` equals the beta
/// divergence for any base point.
pub fn quasi_log_likelihood<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
    base: T,
) -> Result<LikelihoodValue<T>> {
    quasi_log_likelihood_with(vf, x, mu, base, &EvalOptions::default())
}

pub fn quasi_log_likelihood_with<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
    base: T,
    opts: &EvalOptions<T>,
) -> Result<LikelihoodValue<T>> {
    vf.require_interior("x", x)?;
    vf.require_interior("mu", mu)?;
    vf.require_interior("base", base)?;
    let (value, _) = integrate_converged(&opts.quad, base, mu, |t| Ok((x - t) / vf.eval(t)?))?;
    Ok(LikelihoodValue { value, base })
}

/// Unit deviance: exactly twice the beta divergence.
pub fn unit_deviance<T: Real>(vf: &VarianceFunction<T>, x: T, mu: T) -> Result<T> {
    unit_deviance_with(vf, x, mu, &EvalOptions::default())
}

pub fn unit_deviance_with<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
    opts: &EvalOptions<T>,
) -> Result<T> {
    Ok(T::cast(2.0) * beta_divergence_with(vf, x, mu, opts)?.value)
}
