//! Scaling and translation laws of the beta divergence and the alpha-beta
//! connections.
//!
//! A variance function is *multiplicatively* decomposable when
//! `v(c t) = f(c) v(t)` and *translatively* decomposable when
//! `v(t - c) = f(c) v(t)`. The laws:
//!
//! ```text
//! d_beta(x, mu) = c^2 / f(c) * d_beta(x/c, mu/c)      (multiplicative)
//! d_beta(x, mu) = 1 / f(c)   * d_beta(x+c, mu+c)      (translative)
//! d_alpha(x, mu) = mu * d_beta(x/mu, 1)
//! d_beta(x, mu)  = mu / f(mu) * d_alpha(x, mu)        (multiplicative)
//! ```

use crate::divergence::{
    alpha_divergence_with, beta_divergence_with, DivergenceResult, EvalOptions,
};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::report::PropertyReport;
use crate::varfun::{Family, VarianceFunction};

/// Which decomposition of `v` is being asked about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionKind {
    /// `v(c t) = f(c) v(t)` for positive scale factors `c`.
    Multiplicative,
    /// `v(t - c) = f(c) v(t)` for real shifts `c`.
    Translative,
}

const PROBE_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
enum FactorFn<T> {
    /// `f(c) = c^p`
    Power(T),
    /// `f(c) = gamma^{-c}`
    ExpNeg(T),
    /// Factor measured from the variance function at a reference point.
    Probed {
        vf: VarianceFunction<T>,
        kind: DecompositionKind,
        reference: T,
    },
}

/// Result of probing a variance function for one decomposition kind.
#[derive(Debug, Clone)]
pub struct DecompositionWitness<T> {
    /// `Some(kind)` when the probe certified the decomposition, `None`
    /// when it was rejected.
    pub kind: Option<DecompositionKind>,
    /// Worst relative residual seen on the probe grid.
    pub test_residual: T,
    factor: Option<FactorFn<T>>,
}

impl<T: Real> DecompositionWitness<T> {
    /// The `f(c)` map; `None` when the function is not decomposable.
    pub fn factor(&self, c: T) -> Option<T> {
        let f = self.factor.as_ref()?;
        Some(match f {
            FactorFn::Power(p) => c.powf(*p),
            FactorFn::ExpNeg(gamma) => (-c * gamma.ln()).exp(),
            FactorFn::Probed {
                vf,
                kind,
                reference,
            } => {
                let moved = match kind {
                    DecompositionKind::Multiplicative => c * *reference,
                    DecompositionKind::Translative => *reference - c,
                };
                match (vf.eval(moved), vf.eval(*reference)) {
                    (Ok(num), Ok(den)) => num / den,
                    _ => T::nan(),
                }
            }
        })
    }
}

fn probe_grid<T: Real>(vf: &VarianceFunction<T>, kind: DecompositionKind) -> (Vec<T>, Vec<T>) {
    let d = vf.domain();
    let t_grid: Vec<T> = if d.lower.is_finite() && d.upper.is_finite() {
        (0..8)
            .map(|i| d.lower + (d.upper - d.lower) * T::cast((i as f64 + 0.5) / 8.0))
            .collect()
    } else if d.lower.is_finite() {
        [0.05, 0.2, 0.6, 1.0, 2.5, 7.0, 20.0, 80.0]
            .iter()
            .map(|&m| d.lower + T::cast(m))
            .collect()
    } else {
        [-20.0, -5.0, -1.5, -0.4, 0.4, 1.5, 5.0, 20.0]
            .iter()
            .map(|&m| T::cast(m))
            .collect()
    };
    let c_grid: Vec<T> = match kind {
        DecompositionKind::Multiplicative => [0.25, 0.5, 0.8, 1.25, 2.0, 3.0, 5.0, 8.0]
            .iter()
            .map(|&c| T::cast(c))
            .collect(),
        DecompositionKind::Translative => [-3.0, -1.0, -0.4, 0.15, 0.4, 1.0, 2.5, 5.0]
            .iter()
            .map(|&c| T::cast(c))
            .collect(),
    };
    (t_grid, c_grid)
}

/// Probes `v` on an 8 x 8 grid of (c, t) pairs for the requested
/// decomposition. Named families with analytic factors still go through
/// the probe; the witness then carries the exact factor map.
pub fn detect_decomposition<T: Real>(
    vf: &VarianceFunction<T>,
    kind: DecompositionKind,
) -> DecompositionWitness<T> {
    let (t_grid, c_grid) = probe_grid(vf, kind);
    let interior = |t: T| vf.domain().contains(t) && !vf.domain().on_boundary(t);
    let moved = |t: T, c: T| match kind {
        DecompositionKind::Multiplicative => c * t,
        DecompositionKind::Translative => t - c,
    };

    let mut worst = T::zero();
    let mut usable_c = 0usize;
    for &c in &c_grid {
        let valid: Vec<T> = t_grid
            .iter()
            .copied()
            .filter(|&t| interior(moved(t, c)))
            .collect();
        if valid.len() < 4 {
            continue;
        }
        usable_c += 1;
        let reference = valid[0];
        let factor = match (vf.eval(moved(reference, c)), vf.eval(reference)) {
            (Ok(n), Ok(d)) => n / d,
            _ => return reject(worst),
        };
        for &t in &valid[1..] {
            let (Ok(lhs), Ok(v)) = (vf.eval(moved(t, c)), vf.eval(t)) else {
                return reject(worst);
            };
            let residual = (lhs - factor * v).abs() / lhs.abs().max(T::cast(1e-300));
            worst = worst.max(residual);
        }
    }
    if usable_c < 4 || worst > T::cast(PROBE_RESIDUAL_TOL) {
        return reject(worst);
    }

    let factor = match (vf.family(), kind) {
        (Family::TweediePower(p), DecompositionKind::Multiplicative) => FactorFn::Power(*p),
        // v constant: translation leaves it untouched, f(c) = c^0 = 1.
        (Family::TweediePower(p), DecompositionKind::Translative) if *p == T::zero() => {
            FactorFn::Power(T::zero())
        }
        (Family::Exponential(g), DecompositionKind::Translative) => FactorFn::ExpNeg(*g),
        _ => FactorFn::Probed {
            vf: vf.clone(),
            kind,
            reference: first_interior_reference(vf, kind),
        },
    };
    DecompositionWitness {
        kind: Some(kind),
        test_residual: worst,
        factor: Some(factor),
    }
}

fn first_interior_reference<T: Real>(vf: &VarianceFunction<T>, kind: DecompositionKind) -> T {
    let (t_grid, _) = probe_grid(vf, kind);
    t_grid[0]
}

fn reject<T: Real>(residual: T) -> DecompositionWitness<T> {
    DecompositionWitness {
        kind: None,
        test_residual: residual,
        factor: None,
    }
}

fn require_witness<T: Real>(
    vf: &VarianceFunction<T>,
    kind: DecompositionKind,
) -> Result<DecompositionWitness<T>> {
    let w = detect_decomposition(vf, kind);
    if w.kind.is_some() {
        Ok(w)
    } else {
        Err(Error::NotDecomposable(kind))
    }
}

/// Checks `d_beta(x, mu) = c^2 / f(c) * d_beta(x/c, mu/c)` for a
/// multiplicatively decomposable variance function. Pass at 1e-8 relative.
pub fn scale_identity_check<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
    c: T,
) -> Result<PropertyReport<T>> {
    if !(c > T::zero()) {
        return Err(Error::Domain(format!(
            "scale factor c = {c} must be positive"
        )));
    }
    let witness = require_witness(vf, DecompositionKind::Multiplicative)?;
    let opts = EvalOptions::default();
    let lhs = beta_divergence_with(vf, x, mu, &opts)?.value;
    let scaled = beta_divergence_with(vf, x / c, mu / c, &opts)?.value;
    let f = witness.factor(c).expect("witness certified");
    let rhs = c * c / f * scaled;
    Ok(PropertyReport::compare(
        format!("scale c={c}"),
        lhs,
        rhs,
        T::cast(1e-8),
        T::cast(1e-12),
    ))
}

/// Checks `d_beta(x, mu) = 1 / f(c) * d_beta(x+c, mu+c)` for a
/// translatively decomposable variance function. Pass at 1e-8 relative.
pub fn translate_identity_check<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
    c: T,
) -> Result<PropertyReport<T>> {
    let witness = require_witness(vf, DecompositionKind::Translative)?;
    let opts = EvalOptions::default();
    let lhs = beta_divergence_with(vf, x, mu, &opts)?.value;
    let shifted = beta_divergence_with(vf, x + c, mu + c, &opts)?.value;
    let f = witness.factor(c).expect("witness certified");
    let rhs = shifted / f;
    Ok(PropertyReport::compare(
        format!("translate c={c}"),
        lhs,
        rhs,
        T::cast(1e-8),
        T::cast(1e-12),
    ))
}

/// Alpha divergence from the beta divergence: `d_alpha(x, mu) = mu *
/// d_beta(x/mu, 1)`. Works for any family whose domain strictly contains 1.
pub fn alpha_from_beta<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
) -> Result<DivergenceResult<T>> {
    if !(mu > T::zero()) {
        return Err(Error::Domain(format!("mu = {mu} must be positive")));
    }
    vf.require_interior("x/mu", x / mu)?;
    vf.require_interior("alpha base point 1", T::one())?;
    let inner = beta_divergence_with(vf, x / mu, T::one(), &EvalOptions::default())?;
    Ok(DivergenceResult {
        value: mu * inner.value,
        method: inner.method,
        error_estimate: mu * inner.error_estimate,
    })
}

/// Beta divergence from the alpha divergence:
/// `d_beta(x, mu) = mu / f(mu) * d_alpha(x, mu)` (Tweedie: `mu^{1-p}`).
/// Requires multiplicative decomposability.
pub fn beta_from_alpha<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
) -> Result<DivergenceResult<T>> {
    let witness = require_witness(vf, DecompositionKind::Multiplicative)?;
    let alpha = alpha_divergence_with(vf, x, mu, &EvalOptions::default())?;
    let f = witness.factor(mu).expect("witness certified");
    let scale = mu / f;
    Ok(DivergenceResult {
        value: scale * alpha.value,
        method: alpha.method,
        error_estimate: scale.abs() * alpha.error_estimate,
    })
}

/// Compares `d_alpha(x, mu)` against `d_alpha(mu, x)`. Pass at 1e-8
/// relative; symmetric only for variance functions whose dual cumulant
/// satisfies `phi(r) = r phi(1/r)` (Tweedie p = 3/2).
pub fn alpha_symmetry_check<T: Real>(
    vf: &VarianceFunction<T>,
    x: T,
    mu: T,
) -> Result<PropertyReport<T>> {
    let opts = EvalOptions::default();
    let forward = alpha_divergence_with(vf, x, mu, &opts)?.value;
    let reversed = alpha_divergence_with(vf, mu, x, &opts)?.value;
    Ok(PropertyReport::compare(
        "alpha symmetry",
        forward,
        reversed,
        T::cast(1e-8),
        T::cast(1e-12),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varfun::VfExpression;
    use std::f64::consts::LN_2;

    #[test]
    fn tweedie_is_multiplicative_with_power_factor() {
        let w = detect_decomposition(
            &VarianceFunction::<f64>::tweedie(2.0),
            DecompositionKind::Multiplicative,
        );
        assert_eq!(w.kind, Some(DecompositionKind::Multiplicative));
        assert_eq!(w.factor(3.0).unwrap(), 9.0);
        assert!(w.test_residual <= 1e-9);
    }

    #[test]
    fn expvf_is_translative_with_exp_factor() {
        let vf = VarianceFunction::<f64>::exponential(2.0).unwrap();
        let w = detect_decomposition(&vf, DecompositionKind::Translative);
        assert_eq!(w.kind, Some(DecompositionKind::Translative));
        assert!((w.factor(1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bernoulli_decomposes_neither_way() {
        let vf = VarianceFunction::<f64>::bernoulli();
        assert_eq!(
            detect_decomposition(&vf, DecompositionKind::Multiplicative).kind,
            None
        );
        assert_eq!(
            detect_decomposition(&vf, DecompositionKind::Translative).kind,
            None
        );
    }

    #[test]
    fn negbin_and_sech_reject_multiplicative() {
        assert_eq!(
            detect_decomposition(
                &VarianceFunction::<f64>::negative_binomial(),
                DecompositionKind::Multiplicative
            )
            .kind,
            None
        );
        assert_eq!(
            detect_decomposition(
                &VarianceFunction::<f64>::hyperbolic_secant(),
                DecompositionKind::Translative
            )
            .kind,
            None
        );
    }

    #[test]
    fn gaussian_is_translative_with_unit_factor() {
        let vf = VarianceFunction::<f64>::tweedie(0.0);
        let w = detect_decomposition(&vf, DecompositionKind::Translative);
        assert_eq!(w.kind, Some(DecompositionKind::Translative));
        assert_eq!(w.factor(-7.0).unwrap(), 1.0);
    }

    #[test]
    fn custom_linear_probes_multiplicative() {
        let vf = VarianceFunction::<f64>::custom(VfExpression::parse("2*mu").unwrap()).unwrap();
        let w = detect_decomposition(&vf, DecompositionKind::Multiplicative);
        assert_eq!(w.kind, Some(DecompositionKind::Multiplicative));
        assert!((w.factor(5.0).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn scale_check_poisson_reference() {
        let poisson = VarianceFunction::<f64>::tweedie(1.0);
        let r = scale_identity_check(&poisson, 4.0, 2.0, 2.0).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.lhs - (4.0 * LN_2 - 2.0)).abs() < 1e-12);
        assert!((r.lhs - 0.7725887).abs() < 1e-7);
    }

    #[test]
    fn scale_check_is_exact_at_unit_scale() {
        let vf = VarianceFunction::<f64>::tweedie(0.0);
        let r = scale_identity_check(&vf, 3.0, 1.0, 1.0).unwrap();
        assert_eq!(r.lhs, r.rhs);
    }

    #[test]
    fn scale_check_rejects_bernoulli() {
        let r = scale_identity_check(&VarianceFunction::<f64>::bernoulli(), 0.2, 0.4, 0.5);
        assert!(matches!(
            r,
            Err(Error::NotDecomposable(DecompositionKind::Multiplicative))
        ));
    }

    #[test]
    fn translation_invariance_for_gaussian() {
        let vf = VarianceFunction::<f64>::tweedie(0.0);
        let r = translate_identity_check(&vf, 3.0, 1.0, -7.0).unwrap();
        assert!(r.pass);
        assert!((r.lhs - 2.0).abs() < 1e-14);
        assert!((r.rhs - 2.0).abs() < 1e-14);
    }

    #[test]
    fn translation_factor_for_expvf() {
        let vf = VarianceFunction::<f64>::exponential(std::f64::consts::E).unwrap();
        let r = translate_identity_check(&vf, 1.0, 0.0, 1.0).unwrap();
        assert!(r.pass, "{r:?}");
        // d_beta(1, 0) under gamma^mu with gamma = e equals 1/e.
        assert!((r.lhs - std::f64::consts::E.recip()).abs() < 1e-9);
    }

    #[test]
    fn translation_is_exact_at_zero_shift() {
        let vf = VarianceFunction::<f64>::exponential(2.0).unwrap();
        let r = translate_identity_check(&vf, 1.5, 0.5, 0.0).unwrap();
        assert_eq!(r.lhs, r.rhs);
    }

    #[test]
    fn alpha_from_beta_reference() {
        let gaussian = VarianceFunction::<f64>::tweedie(0.0);
        let r = alpha_from_beta(&gaussian, 3.0, 2.0).unwrap();
        assert!((r.value - 0.25).abs() < 1e-14);

        let poisson = VarianceFunction::<f64>::tweedie(1.0);
        let via = alpha_from_beta(&poisson, 2.0, 1.0).unwrap();
        let direct = crate::divergence::alpha_divergence(&poisson, 2.0, 1.0).unwrap();
        assert!((via.value - direct.value).abs() < 1e-12);

        let negbin = VarianceFunction::<f64>::negative_binomial();
        let via = alpha_from_beta(&negbin, 2.0, 1.0).unwrap();
        let direct = crate::divergence::alpha_divergence(&negbin, 2.0, 1.0).unwrap();
        assert!(
            (via.value - direct.value).abs()
                <= (via.error_estimate + direct.error_estimate).max(1e-9)
        );
    }

    #[test]
    fn beta_from_alpha_reference() {
        let gaussian = VarianceFunction::<f64>::tweedie(0.0);
        let r = beta_from_alpha(&gaussian, 3.0, 2.0).unwrap();
        assert!((r.value - 0.5).abs() < 1e-14);

        // For v(mu) = mu the two divergences coincide.
        let poisson = VarianceFunction::<f64>::tweedie(1.0);
        let beta = crate::divergence::beta_divergence(&poisson, 2.5, 0.7).unwrap();
        let via = beta_from_alpha(&poisson, 2.5, 0.7).unwrap();
        assert!((beta.value - via.value).abs() < 1e-12);

        assert!(beta_from_alpha(&VarianceFunction::<f64>::negative_binomial(), 2.0, 1.0).is_err());
    }

    #[test]
    fn symmetry_holds_only_at_three_halves() {
        let hellinger = VarianceFunction::<f64>::tweedie(1.5);
        assert!(alpha_symmetry_check(&hellinger, 4.0, 1.0).unwrap().pass);
        let poisson = VarianceFunction::<f64>::tweedie(1.0);
        assert!(!alpha_symmetry_check(&poisson, 4.0, 1.0).unwrap().pass);
        let trivial = alpha_symmetry_check(&poisson, 2.0, 2.0).unwrap();
        assert!(trivial.pass);
    }
}
