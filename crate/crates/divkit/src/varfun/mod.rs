//! Variance functions and the named-family registry.
//!
//! A [`VarianceFunction`] is a positive function `v` on a mean domain.
//! It is the single object everything else in the crate is induced by:
//! canonical parameter, cumulants, divergences, deviance and densities are
//! all definite integrals of `1/v`, `t/v` or `(x - t)/v`.
//!
//! | family              | v(mu)       | domain    |
//! |---------------------|-------------|-----------|
//! | `tweedie:p=<real>`  | mu^p        | (0, inf), or the real line for p = 0 |
//! | `bernoulli`         | mu - mu^2   | (0, 1)    |
//! | `negbin`            | mu + mu^2   | (0, inf)  |
//! | `sech`              | 1 + mu^2    | real line |
//! | `expvf:gamma=<g>`   | gamma^mu    | real line |
//! | `custom:<expr>`     | expression  | inferred  |

mod expr;

pub use expr::{BinOp, Expr, Func, VfExpression};

use crate::error::{Error, Result};
use crate::real::Real;

/// Interval of admissible mean values, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanDomain<T> {
    pub lower: T,
    pub upper: T,
    pub lower_open: bool,
    pub upper_open: bool,
}

impl<T: Real> MeanDomain<T> {
    /// Open interval `(lower, upper)`; infinities are allowed.
    pub fn open(lower: T, upper: T) -> Self {
        assert!(lower < upper, "mean domain requires lower < upper");
        Self {
            lower,
            upper,
            lower_open: true,
            upper_open: true,
        }
    }

    pub fn real_line() -> Self {
        Self::open(T::neg_infinity(), T::infinity())
    }

    pub fn positive_half_line() -> Self {
        Self::open(T::zero(), T::infinity())
    }

    pub fn unit_interval() -> Self {
        Self::open(T::zero(), T::one())
    }

    /// Whether `t` may be passed to `v`: strictly inside any open endpoint,
    /// up to and including a closed one.
    pub fn contains(&self, t: T) -> bool {
        if !t.is_finite() {
            return false;
        }
        let lower_ok = if self.lower_open {
            t > self.lower
        } else {
            t >= self.lower
        };
        let upper_ok = if self.upper_open {
            t < self.upper
        } else {
            t <= self.upper
        };
        lower_ok && upper_ok
    }

    /// Whether `t` sits exactly on a boundary value.
    pub fn on_boundary(&self, t: T) -> bool {
        t == self.lower || t == self.upper
    }

    fn describe(&self) -> String {
        let left = if self.lower_open { '(' } else { '[' };
        let right = if self.upper_open { ')' } else { ']' };
        format!("{left}{}, {}{right}", self.lower, self.upper)
    }
}

/// The registry of named families plus free-form expressions.
#[derive(Debug, Clone, PartialEq)]
pub enum Family<T> {
    /// Power variance `v(mu) = mu^p`.
    TweediePower(T),
    /// `v(mu) = mu - mu^2` on (0, 1).
    Bernoulli,
    /// `v(mu) = mu + mu^2` on (0, inf).
    NegativeBinomial,
    /// `v(mu) = 1 + mu^2` on the real line.
    HyperbolicSecant,
    /// `v(mu) = gamma^mu` on the real line, gamma > 0.
    Exponential(T),
    /// User-supplied expression in `mu`.
    Custom(VfExpression<T>),
}

/// A positive variance function on its mean domain, with a default base
/// point used where an integral needs a fixed lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceFunction<T> {
    family: Family<T>,
    domain: MeanDomain<T>,
    default_base: T,
}

impl<T: Real> VarianceFunction<T> {
    /// Tweedie power family `v(mu) = mu^p`. Any real `p` is accepted; for
    /// 0 < p < 1 no dispersion model exists and [`Self::edm_warning`]
    /// reports it, though the formulas stay evaluable.
    pub fn tweedie(p: T) -> Self {
        let domain = if p == T::zero() {
            MeanDomain::real_line()
        } else {
            MeanDomain::positive_half_line()
        };
        Self {
            family: Family::TweediePower(p),
            domain,
            default_base: T::one(),
        }
    }

    pub fn bernoulli() -> Self {
        Self {
            family: Family::Bernoulli,
            domain: MeanDomain::unit_interval(),
            default_base: T::cast(0.5),
        }
    }

    pub fn negative_binomial() -> Self {
        Self {
            family: Family::NegativeBinomial,
            domain: MeanDomain::positive_half_line(),
            default_base: T::one(),
        }
    }

    pub fn hyperbolic_secant() -> Self {
        Self {
            family: Family::HyperbolicSecant,
            domain: MeanDomain::real_line(),
            default_base: T::zero(),
        }
    }

    /// Exponential variance `v(mu) = gamma^mu`, `gamma > 0`. Exposed on the
    /// whole real line; no claim is made that a dispersion model with this
    /// variance exists.
    pub fn exponential(gamma: T) -> Result<Self> {
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(Error::Domain(format!(
                "expvf gamma must be positive and finite, got {gamma}"
            )));
        }
        Ok(Self {
            family: Family::Exponential(gamma),
            domain: MeanDomain::real_line(),
            default_base: T::zero(),
        })
    }

    /// Custom expression with domain inference: the real line, the positive
    /// half line and the unit interval are probed in that order and the
    /// first on which the expression stays positive (256-point sample,
    /// log-spaced on half lines) is adopted.
    pub fn custom(expression: VfExpression<T>) -> Result<Self> {
        let candidates = [
            (MeanDomain::real_line(), T::zero()),
            (MeanDomain::positive_half_line(), T::one()),
            (MeanDomain::unit_interval(), T::cast(0.5)),
        ];
        let mut first_failure = None;
        for (domain, base) in candidates {
            match Self::custom_in(expression.clone(), domain, base) {
                Ok(vf) => return Ok(vf),
                Err(e) => first_failure.get_or_insert(e),
            };
        }
        Err(first_failure.expect("at least one candidate was probed"))
    }

    /// Custom expression on an explicit domain. Positivity is checked by
    /// sampling 256 interior points.
    pub fn custom_in(expression: VfExpression<T>, domain: MeanDomain<T>, base: T) -> Result<Self> {
        if !domain.contains(base) || domain.on_boundary(base) {
            return Err(Error::Domain(format!(
                "default base {base} is not interior to {}",
                domain.describe()
            )));
        }
        for t in probe_points(&domain) {
            let v = expression.eval(t)?;
            if !(v > T::zero()) {
                return Err(Error::NonPositive {
                    at: t.as_f64(),
                    value: v.as_f64(),
                });
            }
        }
        Ok(Self {
            family: Family::Custom(expression),
            domain,
            default_base: base,
        })
    }

    /// Parses a CLI-style family token: `tweedie:p=<real>`, `bernoulli`,
    /// `negbin`, `sech`, `expvf:gamma=<real>` or `custom:<expr>`.
    pub fn parse_token(token: &str) -> Result<Self> {
        let (head, rest) = match token.find(':') {
            Some(i) => (&token[..i], Some(&token[i + 1..])),
            None => (token, None),
        };
        let parse_param = |rest: Option<&str>, key: &str| -> Result<T> {
            let body = rest.ok_or_else(|| Error::Parse {
                offset: token.len(),
                message: format!("`{head}` needs `:{key}=<real>`"),
            })?;
            let value = body
                .strip_prefix(key)
                .and_then(|s| s.strip_prefix('='))
                .ok_or_else(|| Error::Parse {
                    offset: head.len() + 1,
                    message: format!("expected `{key}=<real>`, found `{body}`"),
                })?;
            value.parse::<f64>().map(T::cast).map_err(|_| Error::Parse {
                offset: head.len() + 2 + key.len(),
                message: format!("invalid number `{value}`"),
            })
        };
        match head {
            "tweedie" => Ok(Self::tweedie(parse_param(rest, "p")?)),
            "bernoulli" => Ok(Self::bernoulli()),
            "negbin" => Ok(Self::negative_binomial()),
            "sech" => Ok(Self::hyperbolic_secant()),
            "expvf" => Self::exponential(parse_param(rest, "gamma")?),
            "custom" => {
                let body = rest.ok_or_else(|| Error::Parse {
                    offset: token.len(),
                    message: "`custom` needs `:<expression>`".into(),
                })?;
                Self::custom(VfExpression::parse(body)?)
            }
            other => Err(Error::Parse {
                offset: 0,
                message: format!(
                    "unknown family `{other}` (expected tweedie, bernoulli, negbin, sech, expvf or custom)"
                ),
            }),
        }
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn domain(&self) -> &MeanDomain<T> {
        &self.domain
    }

    pub fn default_base(&self) -> T {
        self.default_base
    }

    /// Same variance function with a different default base point.
    pub fn with_base(mut self, base: T) -> Result<Self> {
        if !self.domain.contains(base) || self.domain.on_boundary(base) {
            return Err(Error::Domain(format!(
                "base {base} is not interior to {}",
                self.domain.describe()
            )));
        }
        self.default_base = base;
        Ok(self)
    }

    /// Warning for families whose formulas are evaluable but which have no
    /// associated exponential dispersion model.
    pub fn edm_warning(&self) -> Option<&'static str> {
        match &self.family {
            Family::TweediePower(p) if *p > T::zero() && *p < T::one() => {
                Some("no exponential dispersion model exists for Tweedie 0 < p < 1")
            }
            Family::Exponential(_) => {
                Some("no dispersion model is claimed for the exponential variance family")
            }
            _ => None,
        }
    }

    /// Rejects arguments that are not strictly interior to the domain.
    pub fn require_interior(&self, name: &str, t: T) -> Result<()> {
        if self.domain.contains(t) && !self.domain.on_boundary(t) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{name} = {t} is not strictly inside {}",
                self.domain.describe()
            )))
        }
    }

    /// Evaluates `v(t)` for `t` inside the domain.
    pub fn eval(&self, t: T) -> Result<T> {
        if !self.domain.contains(t) {
            return Err(Error::Domain(format!(
                "t = {t} lies outside the mean domain {}",
                self.domain.describe()
            )));
        }
        let v = match &self.family {
            Family::TweediePower(p) => t.powf(*p),
            Family::Bernoulli => t - t * t,
            Family::NegativeBinomial => t + t * t,
            Family::HyperbolicSecant => T::one() + t * t,
            Family::Exponential(gamma) => gamma.powf(t),
            Family::Custom(expr) => {
                let v = expr.eval(t)?;
                if !(v > T::zero()) {
                    return Err(Error::NonPositive {
                        at: t.as_f64(),
                        value: v.as_f64(),
                    });
                }
                v
            }
        };
        Ok(v)
    }
}

/// 256 interior sample points: log-spaced along infinite directions,
/// uniform across bounded spans.
fn probe_points<T: Real>(domain: &MeanDomain<T>) -> Vec<T> {
    const N: usize = 256;
    let lo = domain.lower;
    let hi = domain.upper;
    let mut points = Vec::with_capacity(N);
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let span = hi - lo;
            for i in 0..N {
                let frac = T::cast((i as f64 + 0.5) / N as f64);
                points.push(lo + span * frac);
            }
        }
        (true, false) => {
            // magnitudes 10^-6 .. 10^6 above the finite endpoint
            for i in 0..N {
                let exp = -6.0 + 12.0 * (i as f64) / (N - 1) as f64;
                points.push(lo + T::cast(10f64.powf(exp)));
            }
        }
        (false, true) => {
            for i in 0..N {
                let exp = -6.0 + 12.0 * (i as f64) / (N - 1) as f64;
                points.push(hi - T::cast(10f64.powf(exp)));
            }
        }
        (false, false) => {
            for i in 0..N / 2 {
                let exp = -3.0 + 6.0 * (i as f64) / (N / 2 - 1) as f64;
                let m = T::cast(10f64.powf(exp));
                points.push(-m);
                points.push(m);
            }
        }
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tweedie_zero_covers_the_real_line() {
        let vf = VarianceFunction::<f64>::tweedie(0.0);
        assert_eq!(*vf.domain(), MeanDomain::real_line());
        assert_eq!(vf.eval(-17.0).unwrap(), 1.0);
        assert_eq!(vf.default_base(), 1.0);
    }

    #[test]
    fn tweedie_power_law_values() {
        assert_eq!(
            VarianceFunction::<f64>::tweedie(2.0).eval(3.0).unwrap(),
            9.0
        );
        assert!((VarianceFunction::<f64>::tweedie(1.5).eval(4.0).unwrap() - 8.0).abs() < 1e-15);
    }

    #[test]
    fn named_family_values() {
        assert_eq!(
            VarianceFunction::<f64>::bernoulli().eval(0.5).unwrap(),
            0.25
        );
        assert_eq!(
            VarianceFunction::<f64>::negative_binomial()
                .eval(2.0)
                .unwrap(),
            6.0
        );
        assert_eq!(
            VarianceFunction::<f64>::hyperbolic_secant()
                .eval(0.0)
                .unwrap(),
            1.0
        );
    }

    #[test]
    fn default_bases_are_interior() {
        for vf in [
            VarianceFunction::<f64>::tweedie(1.5),
            VarianceFunction::<f64>::bernoulli(),
            VarianceFunction::<f64>::negative_binomial(),
            VarianceFunction::<f64>::hyperbolic_secant(),
            VarianceFunction::<f64>::exponential(2.0).unwrap(),
        ] {
            let base = vf.default_base();
            assert!(vf.domain().contains(base) && !vf.domain().on_boundary(base));
        }
        assert_eq!(VarianceFunction::<f64>::bernoulli().default_base(), 0.5);
        assert_eq!(
            VarianceFunction::<f64>::hyperbolic_secant().default_base(),
            0.0
        );
        assert_eq!(
            VarianceFunction::<f64>::exponential(2.0)
                .unwrap()
                .default_base(),
            0.0
        );
    }

    #[test]
    fn out_of_domain_evaluation_fails() {
        let vf = VarianceFunction::<f64>::tweedie(2.0);
        assert!(matches!(vf.eval(-1.0), Err(Error::Domain(_))));
        assert!(matches!(vf.eval(0.0), Err(Error::Domain(_))));
        let b = VarianceFunction::<f64>::bernoulli();
        assert!(matches!(b.eval(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn fractional_p_warns_but_evaluates() {
        let vf = VarianceFunction::<f64>::tweedie(0.5);
        assert!(vf.edm_warning().is_some());
        assert!((vf.eval(4.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(VarianceFunction::<f64>::tweedie(1.0)
            .edm_warning()
            .is_none());
        assert!(VarianceFunction::<f64>::tweedie(0.0)
            .edm_warning()
            .is_none());
    }

    #[test]
    fn exponential_requires_positive_gamma() {
        assert!(VarianceFunction::<f64>::exponential(-2.0).is_err());
        assert!(VarianceFunction::<f64>::exponential(0.0).is_err());
        let vf = VarianceFunction::<f64>::exponential(2.0).unwrap();
        assert_eq!(vf.eval(3.0).unwrap(), 8.0);
        assert_eq!(vf.eval(-1.0).unwrap(), 0.5);
    }

    #[test]
    fn custom_domain_inference() {
        // Positive everywhere: real line.
        let sech_like =
            VarianceFunction::<f64>::custom(VfExpression::parse("1 + mu^2").unwrap()).unwrap();
        assert_eq!(*sech_like.domain(), MeanDomain::real_line());
        assert!(sech_like.eval(0.0).is_ok());

        // Positive only on the positive half line.
        let linear = VarianceFunction::<f64>::custom(VfExpression::parse("2*mu").unwrap()).unwrap();
        assert_eq!(*linear.domain(), MeanDomain::positive_half_line());
        assert_eq!(linear.default_base(), 1.0);

        // Positive only on the unit interval.
        let bern =
            VarianceFunction::<f64>::custom(VfExpression::parse("mu - mu^2").unwrap()).unwrap();
        assert_eq!(*bern.domain(), MeanDomain::unit_interval());
        assert_eq!(bern.default_base(), 0.5);
    }

    #[test]
    fn custom_that_is_nowhere_positive_is_rejected() {
        let err = VarianceFunction::<f64>::custom(VfExpression::parse("0 - 1 - mu^2").unwrap());
        assert!(err.is_err());
    }

    #[test]
    fn custom_positivity_violation_at_eval_time() {
        // Force a domain where the probe passes but a later point could not:
        // eval re-checks positivity.
        let vf = VarianceFunction::<f64>::custom(VfExpression::parse("mu").unwrap()).unwrap();
        assert!(matches!(vf.eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn token_parsing_round_trips() {
        let vf = VarianceFunction::<f64>::parse_token("tweedie:p=1.5").unwrap();
        assert!(matches!(vf.family(), Family::TweediePower(p) if *p == 1.5));
        assert!(matches!(
            VarianceFunction::<f64>::parse_token("bernoulli")
                .unwrap()
                .family(),
            Family::Bernoulli
        ));
        assert!(matches!(
            VarianceFunction::<f64>::parse_token("negbin")
                .unwrap()
                .family(),
            Family::NegativeBinomial
        ));
        assert!(matches!(
            VarianceFunction::<f64>::parse_token("sech")
                .unwrap()
                .family(),
            Family::HyperbolicSecant
        ));
        let e = VarianceFunction::<f64>::parse_token("expvf:gamma=2").unwrap();
        assert!(matches!(e.family(), Family::Exponential(g) if *g == 2.0));
        let c = VarianceFunction::<f64>::parse_token("custom:1 + mu^2").unwrap();
        assert!(matches!(c.family(), Family::Custom(_)));
    }

    #[test]
    fn bad_tokens_are_parse_errors() {
        assert!(VarianceFunction::<f64>::parse_token("weibull").is_err());
        assert!(VarianceFunction::<f64>::parse_token("tweedie").is_err());
        assert!(VarianceFunction::<f64>::parse_token("tweedie:p=abc").is_err());
        assert!(VarianceFunction::<f64>::parse_token("expvf:gamma=-1").is_err());
    }

    #[test]
    fn named_families_positive_on_interior_samples() {
        let families = [
            VarianceFunction::<f64>::tweedie(0.0),
            VarianceFunction::<f64>::tweedie(1.0),
            VarianceFunction::<f64>::tweedie(1.5),
            VarianceFunction::<f64>::tweedie(2.0),
            VarianceFunction::<f64>::tweedie(3.0),
            VarianceFunction::<f64>::bernoulli(),
            VarianceFunction::<f64>::negative_binomial(),
            VarianceFunction::<f64>::hyperbolic_secant(),
            VarianceFunction::<f64>::exponential(2.0).unwrap(),
        ];
        for vf in families {
            for i in 0..1000 {
                let frac = (i as f64 + 0.5) / 1000.0;
                let d = vf.domain();
                let t = if d.lower.is_finite() && d.upper.is_finite() {
                    d.lower + (d.upper - d.lower) * frac
                } else if d.lower.is_finite() {
                    d.lower + 10f64.powf(-3.0 + 6.0 * frac)
                } else {
                    -8.0 + 16.0 * frac
                };
                assert!(vf.eval(t).unwrap() > 0.0, "{:?} at {t}", vf.family());
            }
        }
    }
}
