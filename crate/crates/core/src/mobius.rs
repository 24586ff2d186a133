//! Integer Möbius maps `x -> (a x + b) / (c x + d)`.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::QuadSurd;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mobius {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

/// Result of applying a map: a finite value or the pole's image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MobiusValue {
    Finite(QuadSurd),
    Infinity,
}

impl MobiusValue {
    pub fn finite(self) -> Option<QuadSurd> {
        match self {
            MobiusValue::Finite(x) => Some(x),
            MobiusValue::Infinity => None,
        }
    }
}

impl Mobius {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Mobius { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    /// `[[0, eps], [1, a]]`, the map `x -> eps / (a + x)`.
    pub fn digit(eps: i8, a: u64) -> Self {
        Self::new(0, eps as i64, 1, a)
    }

    /// `[[1, n], [0, 1]]`, the translation `x -> x + n`.
    pub fn shift(n: impl Into<BigInt>) -> Self {
        Self::new(1, n, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn compose(&self, o: &Mobius) -> Mobius {
        Mobius {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    /// Inverse map (the adjugate; a scalar factor does not change the action).
    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn transpose(&self) -> Mobius {
        Mobius { a: self.a.clone(), b: self.c.clone(), c: self.b.clone(), d: self.d.clone() }
    }

    pub fn pow(&self, k: u32) -> Mobius {
        let mut acc = Mobius::identity();
        for _ in 0..k {
            acc = acc.compose(self);
        }
        acc
    }

    pub fn neg(&self) -> Mobius {
        Mobius { a: -&self.a, b: -&self.b, c: -&self.c, d: -&self.d }
    }

    /// Entrywise equality up to a global sign, i.e. equality as maps for
    /// determinant ±1 matrices.
    pub fn same_map(&self, o: &Mobius) -> bool {
        self == o || *self == o.neg()
    }

    pub fn apply(&self, x: &QuadSurd) -> MobiusValue {
        let den = x * &QuadSurd::from_int(self.c.clone()) + QuadSurd::from_int(self.d.clone());
        if den.is_zero() {
            return MobiusValue::Infinity;
        }
        let num = x * &QuadSurd::from_int(self.a.clone()) + QuadSurd::from_int(self.b.clone());
        MobiusValue::Finite(num / den)
    }

    /// Image of the point at infinity, `a / c`.
    pub fn at_infinity(&self) -> MobiusValue {
        if self.c.is_zero() {
            MobiusValue::Infinity
        } else {
            MobiusValue::Finite(QuadSurd::new(self.a.clone(), 0, self.c.clone(), 0).unwrap())
        }
    }

    pub fn apply_f64(&self, x: f64) -> f64 {
        let f = |n: &BigInt| num_traits::ToPrimitive::to_f64(n).unwrap_or(f64::NAN);
        (f(&self.a) * x + f(&self.b)) / (f(&self.c) * x + f(&self.d))
    }

    /// Real fixed points, roots of `c x^2 + (d - a) x - b`.
    pub fn fixed_points(&self) -> Vec<QuadSurd> {
        let (qa, qb, qc) = (self.c.clone(), &self.d - &self.a, -&self.b);
        if qa.is_zero() {
            if qb.is_zero() {
                return vec![];
            }
            return vec![QuadSurd::new(-qc, 0, qb, 0).unwrap()];
        }
        let disc = &qb * &qb - BigInt::from(4) * &qa * &qc;
        if disc.is_negative() {
            return vec![];
        }
        let Ok(du) = u64::try_from(&disc) else {
            // radicands beyond u64 do not occur for the maps used here
            return vec![];
        };
        let two_a = BigInt::from(2) * &qa;
        let r1 = QuadSurd::new(-&qb, 1, two_a.clone(), du).unwrap();
        let r2 = QuadSurd::new(-&qb, -1, two_a, du).unwrap();
        if r1 == r2 {
            vec![r1]
        } else {
            vec![r1, r2]
        }
    }

    /// The fixed point with `|c x + d| > 1`, where the derivative
    /// `det / (c x + d)^2` has modulus below one.
    pub fn attracting_fixed_point(&self) -> Result<QuadSurd> {
        let det = self.det().abs();
        if !det.is_one() {
            return Err(Error::Domain("attracting fixed point needs |det| = 1".into()));
        }
        for x in self.fixed_points() {
            let slope = &x * &QuadSurd::from_int(self.c.clone()) + QuadSurd::from_int(self.d.clone());
            if slope.abs() > QuadSurd::one() {
                return Ok(x);
            }
        }
        Err(Error::NoRealFixedPoint)
    }
}

impl Mul for &Mobius {
    type Output = Mobius;
    fn mul(self, o: &Mobius) -> Mobius {
        self.compose(o)
    }
}

impl fmt::Debug for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}
