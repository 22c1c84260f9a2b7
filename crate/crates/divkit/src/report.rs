//! Machine-readable outcome of a verified identity.

use crate::real::Real;

/// One checked identity: both sides, their errors and a pass flag.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport<T> {
    pub name: String,
    pub lhs: T,
    pub rhs: T,
    pub abs_err: T,
    pub rel_err: T,
    pub pass: bool,
}

impl<T: Real> PropertyReport<T> {
    /// Compares `lhs` and `rhs` under a mixed tolerance:
    /// pass iff `|lhs - rhs| <= max(rel_tol * max(|lhs|, |rhs|), abs_tol)`.
    pub fn compare(name: impl Into<String>, lhs: T, rhs: T, rel_tol: T, abs_tol: T) -> Self {
        let abs_err = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        let rel_err = if scale > T::zero() {
            abs_err / scale
        } else {
            T::zero()
        };
        let pass = abs_err <= (rel_tol * scale).max(abs_tol);
        Self {
            name: name.into(),
            lhs,
            rhs,
            abs_err,
            rel_err,
            pass,
        }
    }

    /// Report with an externally decided pass flag (e.g. a standard-error
    /// band from a Monte Carlo run).
    pub fn with_pass(name: impl Into<String>, lhs: T, rhs: T, pass: bool) -> Self {
        let abs_err = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        let rel_err = if scale > T::zero() {
            abs_err / scale
        } else {
            T::zero()
        };
        Self {
            name: name.into(),
            lhs,
            rhs,
            abs_err,
            rel_err,
            pass,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_sides_pass_with_zero_errors() {
        let r = PropertyReport::compare("id", 2.0f64, 2.0, 1e-8, 1e-12);
        assert!(r.pass);
        assert_eq!(r.abs_err, 0.0);
        assert_eq!(r.rel_err, 0.0);
    }

    #[test]
    fn zero_sides_pass_without_dividing() {
        let r = PropertyReport::compare("zeros", 0.0f64, 0.0, 1e-8, 1e-12);
        assert!(r.pass);
        assert_eq!(r.rel_err, 0.0);
    }

    #[test]
    fn relative_tolerance_scales_with_magnitude() {
        let r = PropertyReport::compare("big", 1e9f64, 1e9 + 1.0, 1e-8, 1e-12);
        assert!(r.pass);
        let r = PropertyReport::compare("small", 1.0f64, 1.0 + 1e-4, 1e-8, 1e-12);
        assert!(!r.pass);
    }
}
