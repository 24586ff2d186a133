//! Scalar backends for orbit simulation: `f64` and double-double.

use std::ops::{Add, Div, Mul, Sub};

use num_traits::ToPrimitive;
use twofloat::TwoFloat;

use crate::exact::QuadSurd;

pub trait Real:
    Copy
    + Send
    + Sync
    + 'static
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    /// Nearest representable value (to within the backend's precision).
    fn from_surd(x: &QuadSurd) -> Self;
    fn to_f64(self) -> f64;
    fn floor(self) -> Self;
    fn abs(self) -> Self;

    fn is_zero(self) -> bool {
        self.to_f64() == 0.0
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_surd(x: &QuadSurd) -> Self {
        x.to_f64()
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn floor(self) -> Self {
        f64::floor(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

impl Real for TwoFloat {
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn from_surd(x: &QuadSurd) -> Self {
        let r = x.approx_unchecked(160).mid();
        let hi = r.to_f64().unwrap_or(f64::NAN);
        let rest = num_rational::BigRational::from_float(hi).map(|h| &r - h);
        let lo = rest.and_then(|d| d.to_f64()).unwrap_or(0.0);
        TwoFloat::new_add(hi, lo)
    }
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
    fn floor(self) -> Self {
        TwoFloat::floor(self)
    }
    fn abs(self) -> Self {
        TwoFloat::abs(&self)
    }
}
