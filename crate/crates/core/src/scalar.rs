//! Scalar abstraction for the numeric modules.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point scalar usable by kernels, spectral routines and the GP.
///
/// `f32` and `f64` implement it. Only `nalgebra::RealField` supplies the
/// elementary functions, so method calls such as `x.exp()` stay unambiguous.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`.
    #[inline]
    fn of(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 is representable")
    }

    /// Conversion from a count.
    #[inline]
    fn of_usize(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("usize is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Machine epsilon of the concrete type.
    fn eps() -> Self;

    /// Smallest positive normal value.
    fn min_positive() -> Self;
}

impl Real for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }

    fn min_positive() -> Self {
        f32::MIN_POSITIVE
    }
}

impl Real for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }

    fn min_positive() -> Self {
        f64::MIN_POSITIVE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip<T: Real>() -> f64 {
        T::of(0.25).as_f64()
    }

    #[test]
    fn conversions() {
        assert_eq!(roundtrip::<f32>(), 0.25);
        assert_eq!(roundtrip::<f64>(), 0.25);
        assert_eq!(f64::of_usize(7), 7.0);
    }
}
