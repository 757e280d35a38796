//! Scalar abstraction.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the crate: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count or index.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Lossy conversion to `f64` for reporting.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon.
    #[inline]
    fn eps() -> Self {
        <Self as Float>::epsilon()
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Default
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

/// `q^e` for a possibly large integer exponent.
///
/// Exponents beyond 600 are evaluated through the logarithm so that the
/// result degrades gracefully toward zero instead of stepping through
/// `powi` overflow of intermediate squares.
pub fn qpow<T: Real>(q: T, e: i64) -> T {
    if q == T::zero() {
        return if e == 0 { T::one() } else { T::zero() };
    }
    if e.unsigned_abs() > 600 {
        (T::from_i64(e).expect("exponent representable") * q.ln()).exp()
    } else {
        q.powi(e as i32)
    }
}
