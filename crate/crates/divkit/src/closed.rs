//! Analytic formulas for the named families.
//!
//! These are the fast paths; the quadrature engine is the oracle they are
//! tested against. Limit branches at p = 1 and p = 2 fire only on exact
//! parameter equality; nearby p uses the general formula, which is stable
//! down to |p - 1| of about 1e-7.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::varfun::Family;

/// Which Tweedie formula applies for a stored power parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TweedieBranch {
    General,
    PEq1,
    PEq2,
}

impl TweedieBranch {
    pub fn select<T: Real>(p: T) -> Self {
        if p == T::one() {
            TweedieBranch::PEq1
        } else if p == T::cast(2.0) {
            TweedieBranch::PEq2
        } else {
            TweedieBranch::General
        }
    }
}

fn check_tweedie_args<T: Real>(p: T, x: T, mu: T) -> Result<()> {
    let zero = T::zero();
    let two = T::cast(2.0);
    if p == zero {
        if !x.is_finite() || !mu.is_finite() {
            return Err(Error::Domain(format!("x = {x}, mu = {mu} must be finite")));
        }
        return Ok(());
    }
    if !(mu > zero) || !mu.is_finite() {
        return Err(Error::Domain(format!(
            "mu = {mu} is not strictly inside (0, inf)"
        )));
    }
    if !x.is_finite() || x < zero {
        return Err(Error::Domain(format!("x = {x} is not inside [0, inf)")));
    }
    if x == zero {
        if p >= two {
            return Err(Error::Infinite(format!(
                "tweedie p = {p} diverges as x -> 0"
            )));
        }
        if !(p > zero) {
            // p < 0: x = 0 sits on the domain boundary with no stated limit.
            return Err(Error::Domain(format!(
                "x = 0 is not strictly inside (0, inf) for p = {p}"
            )));
        }
    }
    Ok(())
}

/// Tweedie beta divergence
/// `x^{2-p}/((1-p)(2-p)) - x mu^{1-p}/(1-p) + mu^{2-p}/(2-p)`
/// with the l'Hopital limit branches at p = 1 and p = 2. For p in [0, 2)
/// the boundary x = 0 is admitted through its finite limit.
pub fn tweedie_beta<T: Real>(p: T, x: T, mu: T) -> Result<T> {
    check_tweedie_args(p, x, mu)?;
    let one = T::one();
    let two = T::cast(2.0);
    let value = match TweedieBranch::select(p) {
        TweedieBranch::PEq1 => {
            if x == T::zero() {
                mu
            } else {
                x * (x / mu).ln() - x + mu
            }
        }
        TweedieBranch::PEq2 => {
            let r = x / mu;
            r - r.ln() - one
        }
        TweedieBranch::General => {
            x.powf(two - p) / ((one - p) * (two - p)) - x * mu.powf(one - p) / (one - p)
                + mu.powf(two - p) / (two - p)
        }
    };
    Ok(value)
}

/// Tweedie alpha divergence
/// `x^{2-p} mu^{p-1}/((1-p)(2-p)) - x/(1-p) + mu/(2-p)`
/// with limit branches at p = 1 and p = 2.
pub fn tweedie_alpha<T: Real>(p: T, x: T, mu: T) -> Result<T> {
    let zero = T::zero();
    let one = T::one();
    let two = T::cast(2.0);
    if !(mu > zero) || !mu.is_finite() {
        return Err(Error::Domain(format!(
            "mu = {mu} is not strictly inside (0, inf)"
        )));
    }
    if p == zero {
        if !x.is_finite() {
            return Err(Error::Domain(format!("x = {x} must be finite")));
        }
    } else if !(x > zero) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "x = {x} is not strictly inside (0, inf)"
        )));
    }
    let value = match TweedieBranch::select(p) {
        TweedieBranch::PEq1 => x * (x / mu).ln() - x + mu,
        TweedieBranch::PEq2 => mu * (mu / x).ln() + x - mu,
        TweedieBranch::General => {
            x.powf(two - p) * mu.powf(p - one) / ((one - p) * (two - p)) - x / (one - p)
                + mu / (two - p)
        }
    };
    Ok(value)
}

fn bernoulli_beta<T: Real>(x: T, mu: T) -> Result<T> {
    let zero = T::zero();
    let one = T::one();
    if !(mu > zero && mu < one) {
        return Err(Error::Domain(format!(
            "mu = {mu} is not strictly inside (0, 1)"
        )));
    }
    if !(x >= zero && x <= one) {
        return Err(Error::Domain(format!("x = {x} is not inside [0, 1]")));
    }
    // x ln(x/mu) with the 0 ln 0 = 0 convention, same for the mirror term.
    let left = if x == zero { zero } else { x * (x / mu).ln() };
    let right = if x == one {
        zero
    } else {
        (one - x) * ((one - x) / (one - mu)).ln()
    };
    Ok(left + right)
}

fn negative_binomial_beta<T: Real>(x: T, mu: T) -> Result<T> {
    let zero = T::zero();
    let one = T::one();
    if !(mu > zero) || !(x > zero) || !x.is_finite() || !mu.is_finite() {
        return Err(Error::Domain(format!(
            "x = {x}, mu = {mu} must be strictly inside (0, inf)"
        )));
    }
    Ok(x * (x * (one + mu) / (mu * (one + x))).ln() + ((one + mu) / (one + x)).ln())
}

fn hyperbolic_secant_beta<T: Real>(x: T, mu: T) -> Result<T> {
    if !x.is_finite() || !mu.is_finite() {
        return Err(Error::Domain(format!("x = {x}, mu = {mu} must be finite")));
    }
    let one = T::one();
    let half = T::cast(0.5);
    Ok(x * (x.atan() - mu.atan()) + half * ((one + mu * mu) / (one + x * x)).ln())
}

/// Closed-form beta divergence for `family`, or `None` when the family has
/// no analytic form (custom expressions, exponential variance).
pub fn beta_closed_form<T: Real>(family: &Family<T>, x: T, mu: T) -> Option<Result<T>> {
    match family {
        Family::TweediePower(p) => Some(tweedie_beta(*p, x, mu)),
        Family::Bernoulli => Some(bernoulli_beta(x, mu)),
        Family::NegativeBinomial => Some(negative_binomial_beta(x, mu)),
        Family::HyperbolicSecant => Some(hyperbolic_secant_beta(x, mu)),
        Family::Exponential(_) | Family::Custom(_) => None,
    }
}

/// Closed-form beta divergence for the three non-Tweedie named families.
pub fn family_beta<T: Real>(family: &Family<T>, x: T, mu: T) -> Result<T> {
    match family {
        Family::Bernoulli => bernoulli_beta(x, mu),
        Family::NegativeBinomial => negative_binomial_beta(x, mu),
        Family::HyperbolicSecant => hyperbolic_secant_beta(x, mu),
        other => Err(Error::Unsupported(format!(
            "no family closed form for {other:?}"
        ))),
    }
}

/// Closed-form alpha divergence where one exists (Tweedie only).
pub fn alpha_closed_form<T: Real>(family: &Family<T>, x: T, mu: T) -> Option<Result<T>> {
    match family {
        Family::TweediePower(p) => Some(tweedie_alpha(*p, x, mu)),
        _ => None,
    }
}

/// Nonlinear part of the Tweedie dual cumulant:
/// `mu^{2-p}/((1-p)(2-p))`, with special values `mu^2/2`, `mu ln mu` and
/// `-ln mu` at p = 0, 1, 2. For p = 1 the boundary value x = 0 is admitted
/// with the limit 0.
pub fn tweedie_phi1<T: Real>(p: T, mu: T) -> Result<T> {
    let zero = T::zero();
    let one = T::one();
    let two = T::cast(2.0);
    if p == zero {
        return Ok(T::cast(0.5) * mu * mu);
    }
    match TweedieBranch::select(p) {
        TweedieBranch::PEq1 => {
            if mu == zero {
                Ok(zero)
            } else if mu > zero {
                Ok(mu * mu.ln())
            } else {
                Err(Error::Domain(format!("mu = {mu} is not inside [0, inf)")))
            }
        }
        TweedieBranch::PEq2 => {
            if mu > zero {
                Ok(-mu.ln())
            } else {
                Err(Error::Domain(format!(
                    "mu = {mu} is not strictly inside (0, inf)"
                )))
            }
        }
        TweedieBranch::General => {
            if mu > zero || (mu == zero && p < two && p > zero) {
                Ok(mu.powf(two - p) / ((one - p) * (two - p)))
            } else {
                Err(Error::Domain(format!(
                    "mu = {mu} is not strictly inside (0, inf)"
                )))
            }
        }
    }
}

/// Splits the Tweedie dual cumulant with base `mu0` into its nonlinear and
/// linear (in mu) parts, `phi = phi1 + phi0`. The p = 1 and p = 2 branches
/// of `phi0` carry the constants that make the sum equal the definite
/// integral of `(mu - t)/t^p` from `mu0` to `mu`.
pub fn tweedie_phi_parts<T: Real>(p: T, mu: T, base: T) -> Result<(T, T)> {
    let zero = T::zero();
    let one = T::one();
    let two = T::cast(2.0);
    if p != zero && (!(mu > zero) || !(base > zero)) {
        return Err(Error::Domain(format!(
            "mu = {mu} and base = {base} must be strictly inside (0, inf)"
        )));
    }
    if !mu.is_finite() || !base.is_finite() {
        return Err(Error::Domain(format!(
            "mu = {mu}, base = {base} must be finite"
        )));
    }
    let phi1 = tweedie_phi1(p, mu)?;
    let phi0 = match TweedieBranch::select(p) {
        TweedieBranch::PEq1 => -mu * base.ln() - mu + base,
        TweedieBranch::PEq2 => mu / base - one + base.ln(),
        TweedieBranch::General => {
            -mu * base.powf(one - p) / (one - p) + base.powf(two - p) / (two - p)
        }
    };
    Ok((phi1, phi0))
}
