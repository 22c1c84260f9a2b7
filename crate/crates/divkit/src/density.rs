//! Dispersion-model densities in beta-divergence form,
//! `p(x; mu, phi) = g(x, phi) exp{-d_beta(x, mu) / phi}`.
//!
//! Provided for the three families whose normalizer `g` is known in closed
//! form: Gaussian, Poisson and gamma. All work happens in log space.

use crate::divergence::beta_divergence;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::real::Real;
use crate::report::PropertyReport;
use crate::special::ln_gamma;
use crate::varfun::VarianceFunction;

/// Support of the observation variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support<T> {
    Continuous {
        lower: T,
        upper: T,
    },
    /// Nonnegative integers.
    Counting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Gaussian,
    Poisson,
    Gamma,
}

/// A variance function paired with a dispersion and the matching
/// normalizer, enough to evaluate densities.
#[derive(Debug, Clone)]
pub struct DispersionModel<T> {
    vf: VarianceFunction<T>,
    dispersion: T,
    kind: ModelKind,
    support: Support<T>,
}

impl<T: Real> DispersionModel<T> {
    /// Gaussian with variance `sigma2` (the dispersion).
    pub fn gaussian(sigma2: T) -> Result<Self> {
        if !(sigma2 > T::zero()) || !sigma2.is_finite() {
            return Err(Error::Domain(format!("sigma2 = {sigma2} must be positive")));
        }
        Ok(Self {
            vf: VarianceFunction::tweedie(T::zero()),
            dispersion: sigma2,
            kind: ModelKind::Gaussian,
            support: Support::Continuous {
                lower: T::neg_infinity(),
                upper: T::infinity(),
            },
        })
    }

    /// Poisson; the dispersion is structurally 1.
    pub fn poisson() -> Self {
        Self {
            vf: VarianceFunction::tweedie(T::one()),
            dispersion: T::one(),
            kind: ModelKind::Poisson,
            support: Support::Counting,
        }
    }

    /// Gamma with shape `a`; the dispersion is `1/a`. The rate is implied
    /// by whichever mean the density is evaluated at (`b = a / mu`).
    pub fn gamma(shape: T) -> Result<Self> {
        if !(shape > T::zero()) || !shape.is_finite() {
            return Err(Error::Domain(format!(
                "gamma shape a = {shape} must be positive"
            )));
        }
        Ok(Self {
            vf: VarianceFunction::tweedie(T::cast(2.0)),
            dispersion: shape.recip(),
            kind: ModelKind::Gamma,
            support: Support::Continuous {
                lower: T::zero(),
                upper: T::infinity(),
            },
        })
    }

    pub fn vf(&self) -> &VarianceFunction<T> {
        &self.vf
    }

    pub fn dispersion(&self) -> T {
        self.dispersion
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn support(&self) -> Support<T> {
        self.support
    }

    fn check_support(&self, x: T) -> Result<()> {
        let ok = match self.support {
            Support::Continuous { lower, upper } => x > lower && x < upper && x.is_finite(),
            Support::Counting => x.is_finite() && x >= T::zero() && x.fract() == T::zero(),
        };
        // Gaussian support is open at both infinities; Poisson x = 0 is a
        // genuine support point even though it sits on the mean-domain
        // boundary.
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "x = {x} is outside the support of {:?}",
                self.kind
            )))
        }
    }

    /// `log g(x, phi)`.
    pub fn log_normalizer(&self, x: T) -> Result<T> {
        self.check_support(x)?;
        let value = match self.kind {
            ModelKind::Gaussian => {
                let two_pi = T::cast(2.0) * T::PI();
                -(two_pi * self.dispersion).ln() * T::cast(0.5)
            }
            ModelKind::Poisson => {
                // g(x) = x^x e^{-x} / x!; at x = 0 all three factors are 1.
                let x_ln_x = if x == T::zero() {
                    T::zero()
                } else {
                    x * x.ln()
                };
                x_ln_x - x - ln_gamma(x + T::one())
            }
            ModelKind::Gamma => {
                let a = self.dispersion.recip();
                -x.ln() + a * a.ln() - a - ln_gamma(a)
            }
        };
        Ok(value)
    }

    /// `log p(x; mu, phi) = log g(x, phi) - d_beta(x, mu) / phi`.
    pub fn log_density(&self, x: T, mu: T) -> Result<T> {
        self.vf.require_interior("mu", mu)?;
        let log_g = self.log_normalizer(x)?;
        let d = beta_divergence(&self.vf, x, mu)?;
        Ok(log_g - d.value / self.dispersion)
    }

    pub fn density(&self, x: T, mu: T) -> Result<T> {
        Ok(self.log_density(x, mu)?.exp())
    }
}

/// Converts the dispersion-model normalizer `h` into the beta-form
/// normalizer `g`: `g = h exp{phi(x) / dispersion}`, where `phi(x)` is the
/// dual cumulant at the observation.
pub fn g_from_h<T: Real>(h_value: T, phi_x: T, dispersion: T) -> T {
    h_value * (phi_x / dispersion).exp()
}

/// Log-space variant of [`g_from_h`].
pub fn log_g_from_log_h<T: Real>(log_h: T, phi_x: T, dispersion: T) -> T {
    log_h + phi_x / dispersion
}

/// Integration bounds for a continuous model or a summation cap for a
/// counting model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassBudget<T> {
    Bounds { lower: T, upper: T },
    Cap(u64),
}

/// Checks that the beta-form density carries unit mass: integrates over
/// the given bounds (continuous) or sums up to the cap (counting).
/// Pass at |total - 1| <= 1e-8.
pub fn normalization_check<T: Real>(
    model: &DispersionModel<T>,
    mu: T,
    budget: MassBudget<T>,
) -> Result<PropertyReport<T>> {
    let total = match (model.support(), budget) {
        (Support::Continuous { .. }, MassBudget::Bounds { lower, upper }) => {
            let spec = QuadratureSpec::new(T::cast(1e-11), T::cast(1e-13), 4000);
            integrate(&spec, lower, upper, |x| model.density(x, mu))?
                .require_converged()?
                .value
        }
        (Support::Counting, MassBudget::Cap(cap)) => {
            let mut sum = T::zero();
            for k in 0..=cap {
                sum = sum + model.density(T::cast(k as f64), mu)?;
            }
            sum
        }
        (Support::Continuous { .. }, MassBudget::Cap(_)) => {
            return Err(Error::Domain(
                "continuous model needs integration bounds".into(),
            ))
        }
        (Support::Counting, MassBudget::Bounds { .. }) => {
            return Err(Error::Domain("counting model needs a summation cap".into()))
        }
    };
    Ok(PropertyReport::compare(
        "normalization",
        total,
        T::one(),
        T::cast(1e-8),
        T::cast(1e-8),
    ))
}
