//! Real quadratic surds `(p + q*sqrt(d)) / r` with exact order and floor.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::interval::Interval;

/// Exact real number `(p + q*sqrt(d)) / r`.
///
/// Canonical form: `r > 0`, `gcd(p, q, r) = 1`, `d` squarefree and at least 2
/// whenever `q != 0`, and `q = d = 0` for rational values. Because the form is
/// canonical, derived `Eq` and `Hash` are value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    d: u64,
}

/// Splits `n = s^2 * core` with `core` squarefree.
pub(crate) fn squarefree_split(mut n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 0);
    }
    let mut s: u64 = 1;
    let mut core: u64 = 1;
    let mut p: u64 = 2;
    // Below the cube root, trial division; what remains has at most two
    // prime factors, so it is either a perfect square or squarefree.
    while (p as u128) * (p as u128) * (p as u128) <= n as u128 {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= p;
        }
        if e % 2 == 1 {
            core *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let rt = n.sqrt();
    if rt * rt == n {
        s *= rt;
    } else {
        core *= n;
    }
    (s, core)
}

fn isign(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Sign of `a + b*sqrt(d)` for integers `a, b` and squarefree `d`.
pub(crate) fn sign_ab(a: &BigInt, b: &BigInt, d: u64) -> i8 {
    let sa = isign(a);
    let sb = if d == 0 { 0 } else { isign(b) };
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    let lhs = a * a;
    let rhs = b * b * BigInt::from(d);
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => 0,
    }
}

/// Sign of `a + b*sqrt(d1) + c*sqrt(d2)` with `d1 != d2` squarefree.
///
/// One squaring: when `a + b*sqrt(d1)` and `c*sqrt(d2)` have opposite signs
/// the winner is decided by the sign of `(a + b*sqrt(d1))^2 - c^2*d2`, which
/// again lives in `Q(sqrt d1)`.
pub(crate) fn sign_abc(a: &BigInt, b: &BigInt, d1: u64, c: &BigInt, d2: u64) -> i8 {
    let s1 = sign_ab(a, b, d1);
    let s2 = if d2 == 0 { 0 } else { isign(c) };
    if s2 == 0 {
        return s1;
    }
    if s1 == 0 || s1 == s2 {
        return s2;
    }
    let d1b = BigInt::from(d1);
    let ra = a * a + b * b * &d1b - c * c * BigInt::from(d2);
    let rb = BigInt::from(2) * a * b;
    match sign_ab(&ra, &rb, d1) {
        1 => s1,
        -1 => s2,
        _ => 0,
    }
}

impl QuadSurd {
    /// Builds and canonicalises `(p + q*sqrt(d)) / r`.
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>, r: impl Into<BigInt>, d: u64) -> Result<Self> {
        let (p, q, r) = (p.into(), q.into(), r.into());
        if r.is_zero() {
            return Err(Error::Domain("zero denominator in surd".into()));
        }
        Ok(Self::normalize(p, q, r, d))
    }

    fn normalize(mut p: BigInt, mut q: BigInt, mut r: BigInt, d: u64) -> Self {
        debug_assert!(!r.is_zero());
        let mut d = d;
        if q.is_zero() || d == 0 {
            q = BigInt::zero();
            d = 0;
        } else {
            let (s, core) = squarefree_split(d);
            q *= BigInt::from(s);
            if core == 1 {
                p += &q;
                q = BigInt::zero();
                d = 0;
            } else {
                d = core;
            }
        }
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_one() && !g.is_zero() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        QuadSurd { p, q, r, d }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        QuadSurd { p: n.into(), q: BigInt::zero(), r: BigInt::one(), d: 0 }
    }

    /// `num/den` as a surd. Panics if `den` is zero.
    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self::new(num, 0, den, 0).expect("nonzero denominator")
    }

    pub fn from_rational(x: &BigRational) -> Self {
        Self::normalize(x.numer().clone(), BigInt::zero(), x.denom().clone(), 0)
    }

    /// `sqrt(n)` for a nonnegative integer `n`.
    pub fn sqrt_int(n: u64) -> Self {
        Self::normalize(BigInt::zero(), BigInt::one(), BigInt::one(), n)
    }

    /// Canonical numerator constant.
    pub fn p(&self) -> &BigInt {
        &self.p
    }

    /// Canonical surd coefficient.
    pub fn q(&self) -> &BigInt {
        &self.q
    }

    /// Canonical positive denominator.
    pub fn r(&self) -> &BigInt {
        &self.r
    }

    /// Radicand; 0 for rational values.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// The field `Q(sqrt d)` this value lives in; 0 means `Q`.
    pub fn field(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.d == 0
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.d == 0 && self.r.is_one()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| BigRational::new(self.p.clone(), self.r.clone()))
    }

    /// True when both values lie in one common quadratic field.
    pub fn compatible(&self, other: &Self) -> bool {
        self.d == 0 || other.d == 0 || self.d == other.d
    }

    fn common_field(&self, other: &Self) -> Result<u64> {
        if self.compatible(other) {
            Ok(self.d.max(other.d))
        } else {
            Err(Error::FieldMismatch { left: self.d, right: other.d })
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        let d = self.common_field(o)?;
        Ok(Self::normalize(&self.p * &o.r + &o.p * &self.r, &self.q * &o.r + &o.q * &self.r, &self.r * &o.r, d))
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.checked_add(&-o)
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        let d = self.common_field(o)?;
        let db = BigInt::from(d);
        Ok(Self::normalize(&self.p * &o.p + &self.q * &o.q * db, &self.p * &o.q + &self.q * &o.p, &self.r * &o.r, d))
    }

    /// Multiplicative inverse; `ZeroInput` for zero.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        // r / (p + q sqrt d) = r (p - q sqrt d) / (p^2 - q^2 d)
        let norm = &self.p * &self.p - &self.q * &self.q * BigInt::from(self.d);
        Ok(Self::normalize(&self.r * &self.p, -(&self.r * &self.q), norm, self.d))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        self.common_field(o)?;
        self.checked_mul(&o.recip()?)
    }

    pub fn conj(&self) -> Self {
        QuadSurd { p: self.p.clone(), q: -&self.q, r: self.r.clone(), d: self.d }
    }

    /// Field norm `x * conj(x)`, a rational.
    pub fn norm(&self) -> BigRational {
        let n = &self.p * &self.p - &self.q * &self.q * BigInt::from(self.d);
        BigRational::new(n, &self.r * &self.r)
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn signum(&self) -> i8 {
        sign_ab(&self.p, &self.q, self.d)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact comparison, also across different fields.
    pub fn compare(&self, o: &Self) -> Ordering {
        let s = if self.compatible(o) {
            (self - o).signum()
        } else {
            // (p1 r2 - p2 r1) + q1 r2 sqrt d1 - q2 r1 sqrt d2, over r1 r2 > 0
            let a = &self.p * &o.r - &o.p * &self.r;
            let b = &self.q * &o.r;
            let c = -(&o.q * &self.r);
            sign_abc(&a, &b, self.d, &c, o.d)
        };
        s.cmp(&0)
    }

    /// Sign of `self + o - k`; fields may differ.
    pub fn sign_of_sum_minus(&self, o: &Self, k: &BigInt) -> i8 {
        // numerator over r1 r2: p1 r2 + p2 r1 - k r1 r2 + q1 r2 sqrt d1 + q2 r1 sqrt d2
        let rr = &self.r * &o.r;
        let a = &self.p * &o.r + &o.p * &self.r - k * &rr;
        let b1 = &self.q * &o.r;
        let b2 = &o.q * &self.r;
        if self.compatible(o) {
            let d = self.d.max(o.d);
            sign_ab(&a, &(b1 + b2), d)
        } else {
            sign_abc(&a, &b1, self.d, &b2, o.d)
        }
    }

    /// Greatest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if self.d == 0 {
            return self.p.div_floor(&self.r);
        }
        let n2 = &self.q * &self.q * BigInt::from(self.d);
        let root = n2.sqrt();
        let approx = if self.q.is_negative() { &self.p - &root } else { &self.p + &root };
        let mut n = approx.div_floor(&self.r);
        let zero = Self::zero();
        while self.sign_of_sum_minus(&zero, &n) < 0 {
            n -= 1;
        }
        while self.sign_of_sum_minus(&zero, &(&n + 1)) >= 0 {
            n += 1;
        }
        n
    }

    /// `floor(self + o)` where the two summands may live in different fields.
    ///
    /// An interval enclosure proposes the candidate; exact sign tests confirm
    /// or move it, so the answer never depends on rounding.
    pub fn floor_sum(&self, o: &Self) -> BigInt {
        if self.compatible(o) {
            return (self + o).floor();
        }
        let enc = self.approx_unchecked(64).add(&o.approx_unchecked(64));
        let mut n = enc.lo().floor().to_integer();
        while self.sign_of_sum_minus(o, &n) < 0 {
            n -= 1;
        }
        while self.sign_of_sum_minus(o, &(&n + 1)) >= 0 {
            n += 1;
        }
        n
    }

    /// Certified enclosure with width at most `2^(1-bits) * max(1, |x|)`.
    pub fn approx(&self, bits: u32) -> Result<Interval> {
        if bits < 16 {
            return Err(Error::Domain(format!("approx needs at least 16 bits, got {bits}")));
        }
        if bits > crate::exact::MAX_PRECISION_BITS {
            return Err(Error::PrecisionExhausted { bits });
        }
        Ok(self.approx_unchecked(bits))
    }

    pub(crate) fn approx_unchecked(&self, bits: u32) -> Interval {
        if self.d == 0 {
            let x = BigRational::new(self.p.clone(), self.r.clone());
            return Interval::point(x);
        }
        let k = bits as usize + 2;
        let scale = BigInt::one() << k;
        let n2 = &self.q * &self.q * BigInt::from(self.d) * &scale * &scale;
        let m = n2.sqrt();
        // |q| sqrt d lies in [m, m+1] / 2^k
        let (lo_s, hi_s) =
            if self.q.is_negative() { (-(&m + BigInt::one()), -m.clone()) } else { (m.clone(), &m + BigInt::one()) };
        let den = &self.r * &scale;
        let base = &self.p * &scale;
        Interval::new(BigRational::new(&base + lo_s, den.clone()), BigRational::new(&base + hi_s, den))
    }

    /// Nearest-ish `f64`; accurate to a few ulps.
    pub fn to_f64(&self) -> f64 {
        self.approx_unchecked(64).mid().to_f64().unwrap_or(f64::NAN)
    }

    /// Exact value of a finite `f64` as a rational surd.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(|r| Self::from_rational(&r))
    }

    /// `quad:(p,q,r,d)` or `rat:p/q`; accepted back by the parser.
    pub fn to_syntax(&self) -> String {
        if self.d == 0 {
            format!("rat:{}/{}", self.p, self.r)
        } else {
            format!("quad:({},{},{},{})", self.p, self.q, self.r, self.d)
        }
    }
}

impl fmt::Debug for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 0 {
            if self.r.is_one() {
                write!(f, "{}", self.p)
            } else {
                write!(f, "{}/{}", self.p, self.r)
            }
        } else {
            let qs = if self.q.is_one() {
                String::new()
            } else if (-&self.q).is_one() {
                "-".to_string()
            } else {
                self.q.to_string()
            };
            let num = if self.p.is_zero() {
                format!("{qs}√{}", self.d)
            } else if self.q.is_negative() {
                let qa = -&self.q;
                let qa = if qa.is_one() { String::new() } else { qa.to_string() };
                format!("{}-{qa}√{}", self.p, self.d)
            } else {
                format!("{}+{qs}√{}", self.p, self.d)
            };
            if self.r.is_one() {
                write!(f, "{num}")
            } else {
                write!(f, "({num})/{}", self.r)
            }
        }
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadSurd {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

impl From<i64> for QuadSurd {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigInt> for QuadSurd {
    fn from(n: BigInt) -> Self {
        Self::from_int(n)
    }
}

impl From<&BigRational> for QuadSurd {
    fn from(x: &BigRational) -> Self {
        Self::from_rational(x)
    }
}

impl Neg for &QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd { p: -&self.p, q: -&self.q, r: self.r.clone(), d: self.d }
    }
}

impl Neg for QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        -&self
    }
}

// Operators panic on field mismatch or division by zero, like integer
// arithmetic; the `checked_*` methods report those as errors instead.
macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&QuadSurd> for &QuadSurd {
            type Output = QuadSurd;
            fn $m(self, o: &QuadSurd) -> QuadSurd {
                match self.$checked(o) {
                    Ok(v) => v,
                    Err(e) => panic!("surd {}: {e}", stringify!($m)),
                }
            }
        }
        impl $tr<QuadSurd> for QuadSurd {
            type Output = QuadSurd;
            fn $m(self, o: QuadSurd) -> QuadSurd {
                (&self).$m(&o)
            }
        }
        impl $tr<&QuadSurd> for QuadSurd {
            type Output = QuadSurd;
            fn $m(self, o: &QuadSurd) -> QuadSurd {
                (&self).$m(o)
            }
        }
        impl $tr<QuadSurd> for &QuadSurd {
            type Output = QuadSurd;
            fn $m(self, o: QuadSurd) -> QuadSurd {
                self.$m(&o)
            }
        }
        impl $tr<i64> for &QuadSurd {
            type Output = QuadSurd;
            fn $m(self, o: i64) -> QuadSurd {
                self.$m(&QuadSurd::from_int(o))
            }
        }
        impl $tr<i64> for QuadSurd {
            type Output = QuadSurd;
            fn $m(self, o: i64) -> QuadSurd {
                (&self).$m(&QuadSurd::from_int(o))
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl serde::Serialize for QuadSurd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_syntax())
    }
}

impl<'de> serde::Deserialize<'de> for QuadSurd {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        crate::exact::parse_surd(&s).map_err(serde::de::Error::custom)
    }
}
