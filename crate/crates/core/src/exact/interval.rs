//! Closed rational intervals used as certified enclosures.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigInt::from(2)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// True when the two enclosures cannot contain a common point.
    pub fn disjoint(&self, o: &Self) -> bool {
        self.hi < o.lo || o.hi < self.lo
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    /// Quotient by an interval that excludes zero; `None` otherwise.
    pub fn div(&self, o: &Self) -> Option<Self> {
        if !(o.lo.is_positive() || o.hi.is_negative()) {
            return None;
        }
        let inv = Interval::new(o.hi.recip(), o.lo.recip());
        Some(self.mul(&inv))
    }

    /// Drops precision to dyadics with `bits` fractional bits, rounding outward,
    /// so long products do not grow huge denominators.
    pub fn round_out(&self, bits: u32) -> Self {
        let scale = BigRational::from_integer(BigInt::from(1) << bits as usize);
        let lo = (&self.lo * &scale).floor() / &scale;
        let hi = (&self.hi * &scale).ceil() / &scale;
        Interval { lo, hi }
    }

    /// Outward-rounded `f64` bounds.
    pub fn to_f64_bounds(&self) -> (f64, f64) {
        let lo = self.lo.to_f64().unwrap_or(f64::NEG_INFINITY);
        let hi = self.hi.to_f64().unwrap_or(f64::INFINITY);
        (lo.next_down(), hi.next_up())
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_encloses() {
        let a = Interval::new(r(-1, 2), r(1, 3));
        let b = Interval::new(r(2, 1), r(3, 1));
        let p = a.mul(&b);
        assert_eq!(p.lo(), &r(-3, 2));
        assert_eq!(p.hi(), &r(1, 1));
        assert!(a.sub(&b).contains(&r(-3, 1)));
        assert!(Interval::new(r(0, 1), r(1, 1)).disjoint(&Interval::point(r(2, 1))));
        let (lo, hi) = Interval::point(r(1, 3)).to_f64_bounds();
        assert!(lo < 1.0 / 3.0 && 1.0 / 3.0 < hi);
        let ro = Interval::point(r(1, 3)).round_out(10);
        assert!(ro.contains(&r(1, 3)) && ro.width() <= r(1, 1024));
    }
}
