//! Scalar abstractions.
//!
//! Two families of number types flow through the crate:
//!
//! * [`Scalar`] — the parameter algebra (smoothness, integrability, weight
//!   exponents). The decision procedures only add, multiply, divide and compare,
//!   so they run unchanged on exact rationals ([`crate::Rational`]) or on
//!   floats. Exact rationals are the default because the characterizations flip
//!   on equality.
//! * [`Real`] — sampled functions and quadrature. Anything `rustfft` can
//!   transform (`f32`, `f64`).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};
use rustfft::FftNum;

/// Ordered field used for space parameters.
pub trait Scalar:
    Clone + PartialOrd + Debug + Display + Num + Signed + Send + Sync + 'static
{
    /// Whether arithmetic is exact (no rounding).
    const EXACT: bool;

    /// Exact embedding of a rational value (rounded for float types).
    fn from_ratio(r: &BigRational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(&BigRational::from_integer(BigInt::from(n)))
    }

    fn to_f64(&self) -> f64;

    fn is_integral(&self) -> bool;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_integral(&self) -> bool {
        self.fract() == 0.0
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(r: &BigRational) -> Self {
        ToPrimitive::to_f32(r).unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn is_integral(&self) -> bool {
        self.fract() == 0.0
    }
}

/// Floating-point type for grids, fields and quadrature.
pub trait Real: Float + FloatConst + FftNum + FromPrimitive + Sum + Default + Display {
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("representable literal")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
