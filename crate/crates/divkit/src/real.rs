//! Scalar abstraction for the numeric core.
//!
//! Everything mathematical in this crate is written against [`Real`] so the
//! same code runs in `f32` and `f64`. The default tolerances shipped with the
//! crate target `f64`; `f32` callers should widen them.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into `Self`, rounding if necessary.
    fn cast(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant must be representable")
    }

    /// Lossy view as `f64`, mainly for error reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
