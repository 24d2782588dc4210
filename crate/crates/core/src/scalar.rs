//! Scalar abstraction shared by every routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Real floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    fn lit(v: f64) -> Self;

    /// Lossless widening (or identity) to `f64`.
    fn to_f64_lossy(self) -> f64;

    /// A tolerance given for double precision, floored at `16·ε` of `Self`
    /// so that the same defaults stay attainable in single precision.
    fn tol(v: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(16.0);
        Self::lit(v).max(floor)
    }
}

impl Scalar for f32 {
    fn lit(v: f64) -> Self {
        v as f32
    }

    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn lit(v: f64) -> Self {
        v
    }

    fn to_f64_lossy(self) -> f64 {
        self
    }
}
