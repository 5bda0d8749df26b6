//! Numeric scalars for edge lengths and current weights.
//!
//! Everything in [`crate::outer_space`] and [`crate::currents`] is generic over
//! a [`Scalar`]. Integer scalars give exact length arithmetic on rose-orbit
//! points, rational scalars give exact ratios, and `f64` is the workhorse for
//! the random-walk experiments.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Ring-like scalar usable as an edge length or a current weight.
///
/// Division is only used through [`FieldScalar`]; for integer scalars the
/// length ratios are compared by cross-multiplication instead.
pub trait Scalar:
    Num
    + Copy
    + PartialOrd
    + ToPrimitive
    + FromPrimitive
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Whether this scalar type computes exactly (integers, rationals).
    fn is_exact() -> bool;
}

impl Scalar for f64 {
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for f32 {
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for i64 {
    fn is_exact() -> bool {
        true
    }
}

impl Scalar for Ratio<i64> {
    fn is_exact() -> bool {
        true
    }
}

/// Scalars with exact (or IEEE) division.
pub trait FieldScalar: Scalar {}

impl FieldScalar for f64 {}
impl FieldScalar for f32 {}
impl FieldScalar for Ratio<i64> {}

/// `a/b` versus `c/d` for positive denominators, without dividing.
pub(crate) fn ratio_gt<S: Scalar>(a: S, b: S, c: S, d: S) -> bool {
    a * d > c * b
}
