//! Scalar abstraction for the numeric kernel.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the channel math is generic over: `f32` or `f64`.
///
/// Probability tolerances are per-type: the reference checks (normalization
/// within 1e-12, table totals within 1e-9) are calibrated to `f64`, and the
/// `f32` values are the same checks scaled to its epsilon.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for probability-normalization invariants.
    const NORM_TOL: Self;
    /// Looser tolerance applied to user-supplied probability tables before
    /// renormalization.
    const TABLE_TOL: Self;

    /// Complementary error function, needed for the 1-D first-passage cdf.
    fn erfc(self) -> Self;

    #[inline]
    fn cast_u64(n: u64) -> Self {
        Self::from_u64(n).expect("u64 is representable in any Real")
    }

    #[inline]
    fn cast_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable in any Real")
    }

    #[inline]
    fn cast_f64(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in any Real")
    }

    #[inline]
    fn half() -> Self {
        Self::cast_f64(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::cast_f64(2.0)
    }
}

impl Real for f64 {
    const NORM_TOL: Self = 1e-12;
    const TABLE_TOL: Self = 1e-9;

    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

impl Real for f32 {
    const NORM_TOL: Self = 1e-5;
    const TABLE_TOL: Self = 1e-3;

    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}

/// Binary entropy in bits with the 0·log(1/0) := 0 convention. Internal
/// unchecked variant; the range-checked public entry point is
/// [`crate::bounds::binary_entropy`].
#[inline]
pub(crate) fn h2<R: Real>(lambda: R) -> R {
    debug_assert!(lambda >= R::zero() && lambda <= R::one());
    let mut h = R::zero();
    if lambda > R::zero() {
        h -= lambda * lambda.log2();
    }
    let rest = R::one() - lambda;
    if rest > R::zero() {
        h -= rest * rest.log2();
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfc_matches_known_values() {
        assert!((Real::erfc(1.0f64) - 0.15729920705028513).abs() < 1e-15);
        assert!((Real::erfc(0.0f64) - 1.0).abs() < 1e-15);
        assert!((Real::erfc(1.0f32) - 0.157299).abs() < 1e-5);
    }

    #[test]
    fn h2_endpoints_and_max() {
        assert_eq!(h2(0.0f64), 0.0);
        assert_eq!(h2(1.0f64), 0.0);
        assert_eq!(h2(0.5f64), 1.0);
        assert_eq!(h2(0.5f32), 1.0);
    }
}
