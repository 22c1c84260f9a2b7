//! Log-gamma and digamma, needed by densities and gamma-family expectations.

use crate::real::Real;

// Lanczos approximation, g = 7, 9 coefficients.
#[allow(clippy::excessive_precision)] // published coefficients, kept at full printed precision
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function. Accurate to ~1e-13 relative for
/// positive arguments; negative non-integer arguments go through the
/// reflection formula.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::cast(0.5);
    if x < half {
        // Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = T::PI();
        return pi.ln() - (pi * x).sin().abs().ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::cast(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::cast(c) / (x + T::cast(i as f64));
    }
    let t = x + T::cast(7.5);
    let half_ln_two_pi = T::cast(0.918_938_533_204_672_7); // ln(2 pi) / 2
    half_ln_two_pi + (x + half) * t.ln() - t + acc.ln()
}

/// Digamma (logarithmic derivative of gamma) by upward recurrence into the
/// asymptotic region, then the standard series. Accurate to better than
/// 1e-10 on [0.5, 50].
pub fn digamma<T: Real>(x: T) -> T {
    let c = T::cast(12.0);
    if x.is_nan() || x == T::neg_infinity() {
        return T::nan();
    }
    if x <= T::zero() && x.floor() == x {
        return T::neg_infinity();
    }
    if x < T::zero() {
        // reflection: psi(1 - x) - psi(x) = pi cot(pi x)
        let pi = T::PI();
        return digamma(T::one() - x) + pi / (-pi * x).tan();
    }
    if x <= T::cast(1e-6) {
        let euler = T::cast(0.577_215_664_901_532_9);
        let zeta2 = T::cast(1.644_934_066_848_226_4);
        return -euler - T::one() / x + zeta2 * x;
    }

    let mut result = T::zero();
    let mut z = x;
    while z < c {
        result = result - T::one() / z;
        z = z + T::one();
    }

    let s3 = T::cast(1.0 / 12.0);
    let s4 = T::cast(1.0 / 120.0);
    let s5 = T::cast(1.0 / 252.0);
    let s6 = T::cast(1.0 / 240.0);
    let s7 = T::cast(1.0 / 132.0);
    let mut r = T::one() / z;
    result = result + z.ln() - T::cast(0.5) * r;
    r = r * r;
    result - r * (s3 - r * (s4 - r * (s5 - r * (s6 - r * s7))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_at_integers_matches_factorials() {
        let mut fact = 1.0f64;
        for n in 1..15u32 {
            // Gamma(n) = (n-1)!
            assert!(
                (ln_gamma(f64::from(n)) - fact.ln()).abs() <= 1e-12 * fact.ln().abs().max(1.0),
                "n = {n}"
            );
            fact *= f64::from(n);
        }
    }

    #[test]
    fn ln_gamma_half() {
        // Gamma(1/2) = sqrt(pi)
        let expected = 0.5 * std::f64::consts::PI.ln();
        assert!((ln_gamma(0.5f64) - expected).abs() < 1e-13);
    }

    #[test]
    fn digamma_reference_values() {
        let euler = 0.577_215_664_901_532_9_f64;
        assert!((digamma(1.0f64) + euler).abs() < 1e-12);
        // psi(3) = 1 + 1/2 - euler
        assert!((digamma(3.0f64) - (1.5 - euler)).abs() < 1e-12);
        // psi(1/2) = -euler - 2 ln 2
        assert!((digamma(0.5f64) - (-euler - 2.0 * std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn digamma_matches_recurrence_over_range() {
        // psi(x + 1) = psi(x) + 1/x
        let mut a = 0.5f64;
        while a < 50.0 {
            let lhs = digamma(a + 1.0);
            let rhs = digamma(a) + 1.0 / a;
            assert!((lhs - rhs).abs() < 1e-10, "a = {a}");
            a += 0.37;
        }
    }
}
