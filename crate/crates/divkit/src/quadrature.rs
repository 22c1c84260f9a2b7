//! Adaptive numerical integration over finite intervals.
//!
//! The engine is a nested Gauss(7)/Kronrod(15) pair with bisection of the
//! worst subinterval. Every abscissa of the pair is strictly interior to the
//! interval, so integrands may be singular (but integrable) at an open
//! endpoint; the integrator never evaluates exactly at an endpoint. This is
//! the oracle that every closed form in the crate is checked against.

use crate::error::{Error, Result};
use crate::real::Real;

// 15-point Kronrod abscissae (positive half, descending) and weights, with
// the embedded 7-point Gauss weights. Gauss nodes sit at the odd Kronrod
// indices 1, 3, 5, 7.
#[allow(clippy::excessive_precision)] // canonical table values, kept at full printed precision
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// How the caller regards the interval endpoints.
///
/// All quadrature nodes are strictly interior by construction, so open
/// endpoints are honored for every policy; the field records intent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EndpointPolicy {
    #[default]
    Closed,
    OpenLeft,
    OpenRight,
    OpenBoth,
}

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_subdivisions: usize,
    pub endpoint_policy: EndpointPolicy,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::cast(1e-10),
            abs_tol: T::cast(1e-12),
            max_subdivisions: 2000,
            endpoint_policy: EndpointPolicy::default(),
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(rel_tol: T, abs_tol: T, max_subdivisions: usize) -> Self {
        assert!(
            rel_tol > T::zero() && abs_tol > T::zero(),
            "tolerances must be positive"
        );
        assert!(max_subdivisions >= 1, "need at least one subdivision");
        Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
            endpoint_policy: EndpointPolicy::default(),
        }
    }

    /// Same budget with the relative tolerance scaled by `factor`.
    pub fn relax_rel(mut self, factor: T) -> Self {
        self.rel_tol = self.rel_tol * factor;
        self
    }

    fn tolerance_for(&self, value: T) -> T {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

/// Outcome of one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    /// Signed integral; orientation follows the given bounds.
    pub value: T,
    /// Sum of |Kronrod - Gauss| over the final subintervals.
    pub error_estimate: T,
    /// Number of bisections performed.
    pub subdivisions_used: usize,
    /// Whether `error_estimate <= max(rel_tol * |value|, abs_tol)` was reached.
    pub converged: bool,
}

impl<T: Real> QuadratureResult<T> {
    /// Converts a non-converged result into an error, passing converged
    /// results through. Convenience for callers that treat non-convergence
    /// as fatal.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                error_estimate: self.error_estimate.as_f64(),
                subdivisions: self.subdivisions_used,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    splittable: bool,
}

/// One Gauss(7)/Kronrod(15) pass over `[a, b]`. Returns the Kronrod value
/// and the raw |K15 - G7| difference.
fn kronrod_pair<T, F>(f: &mut F, a: T, b: T) -> Result<(T, T)>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let half = T::cast(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);

    let mut eval = |t: T| -> Result<T> {
        let y = f(t)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteEvaluation {
                abscissa: t.as_f64(),
            })
        }
    };

    let f_center = eval(center)?;
    let mut kronrod = T::cast(WGK[7]) * f_center;
    let mut gauss = T::cast(WG[3]) * f_center;

    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = T::cast(x) * half_len;
        let f_sum = eval(center - dx)? + eval(center + dx)?;
        kronrod = kronrod + T::cast(WGK[j]) * f_sum;
        if j % 2 == 1 {
            gauss = gauss + T::cast(WG[j / 2]) * f_sum;
        }
    }

    let value = kronrod * half_len;
    let error = ((kronrod - gauss) * half_len).abs();
    Ok((value, error))
}

/// Integrates `f` over `[a, b]` under `spec`.
///
/// Orientation is signed: swapping the bounds flips the sign of the result
/// exactly (the integrator runs once over the ascending interval). A
/// non-finite value from `f` aborts with the offending abscissa;
/// non-convergence is not an error and is reported through the
/// [`QuadratureResult::converged`] flag.
pub fn integrate<T, F>(
    spec: &QuadratureSpec<T>,
    a: T,
    b: T,
    mut f: F,
) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "integration bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: T::zero(),
            error_estimate: T::zero(),
            subdivisions_used: 0,
            converged: true,
        });
    }
    let (lo, hi, sign) = if a < b {
        (a, b, T::one())
    } else {
        (b, a, -T::one())
    };

    let (value, error) = kronrod_pair(&mut f, lo, hi)?;
    let mut segments = vec![Segment {
        a: lo,
        b: hi,
        value,
        error,
        splittable: true,
    }];
    let mut subdivisions = 0usize;

    loop {
        let total_value: T = segments.iter().map(|s| s.value).sum();
        let total_error: T = segments.iter().map(|s| s.error).sum();

        if total_error <= spec.tolerance_for(total_value) {
            return Ok(QuadratureResult {
                value: sign * total_value,
                error_estimate: total_error,
                subdivisions_used: subdivisions,
                converged: true,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Ok(QuadratureResult {
                value: sign * total_value,
                error_estimate: total_error,
                subdivisions_used: subdivisions,
                converged: false,
            });
        }

        // Bisect the splittable segment with the largest error.
        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.splittable)
            .max_by(|(_, x), (_, y)| x.error.partial_cmp(&y.error).expect("finite errors"))
            .map(|(i, _)| i);
        let Some(worst) = worst else {
            // Every segment is at floating-point resolution; report as-is.
            return Ok(QuadratureResult {
                value: sign * total_value,
                error_estimate: total_error,
                subdivisions_used: subdivisions,
                converged: false,
            });
        };

        let seg = segments[worst];
        let mid = T::cast(0.5) * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            segments[worst].splittable = false;
            continue;
        }
        let (lv, le) = kronrod_pair(&mut f, seg.a, mid)?;
        let (rv, re) = kronrod_pair(&mut f, mid, seg.b)?;
        segments[worst] = Segment {
            a: seg.a,
            b: mid,
            value: lv,
            error: le,
            splittable: true,
        };
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: rv,
            error: re,
            splittable: true,
        });
        subdivisions += 1;
    }
}
