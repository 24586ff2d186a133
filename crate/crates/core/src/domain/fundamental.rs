//! Fundamental intervals: the set of `alpha` whose own expansion (of
//! `x = alpha` under the map for `alpha`) starts with a given digit string.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::fib;
use crate::cf::{digit_unchecked, Expansion, SignedDigit};
use crate::error::{Error, Result};
use crate::exact::QuadSurd;
use crate::mobius::Mobius;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalInterval {
    pub lo: QuadSurd,
    pub hi: QuadSurd,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl FundamentalInterval {
    pub fn contains(&self, x: &QuadSurd) -> bool {
        let above = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below
    }
}

impl std::fmt::Display for FundamentalInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Real roots of `a x^2 + b x + c` (or of `b x + c` when `a = 0`).
fn roots(a: &BigInt, b: &BigInt, c: &BigInt) -> Result<Vec<QuadSurd>> {
    if a.is_zero() {
        if b.is_zero() {
            return Ok(vec![]);
        }
        return Ok(vec![QuadSurd::new(-c, 0, b.clone(), 0)?]);
    }
    let disc = b * b - BigInt::from(4) * a * c;
    if disc.is_negative() {
        return Ok(vec![]);
    }
    let d = u64::try_from(&disc).map_err(|_| Error::UnsupportedPrefix("discriminant exceeds 64 bits".into()))?;
    let two_a = BigInt::from(2) * a;
    Ok(vec![QuadSurd::new(-b, 1, two_a.clone(), d)?, QuadSurd::new(-b, -1, two_a, d)?])
}

/// Does the expansion of `alpha` under its own map start with `prefix`?
fn starts_with(alpha: &QuadSurd, prefix: &[SignedDigit]) -> bool {
    let mut t = alpha.clone();
    for d in prefix {
        if t.is_zero() || digit_unchecked(&t, alpha) != *d {
            return false;
        }
        t = t.recip().expect("nonzero").abs() - QuadSurd::from_int(d.a);
    }
    true
}

/// A rational strictly between `a < b`.
fn rational_between(a: &QuadSurd, b: &QuadSurd) -> QuadSurd {
    let mut bits = 32;
    loop {
        let (ia, ib) = (a.approx_unchecked(bits), b.approx_unchecked(bits));
        let m = QuadSurd::from_rational(&((ia.hi() + ib.lo()) / BigRational::from_integer(2.into())));
        if a < &m && &m < b {
            return m;
        }
        bits *= 2;
    }
}

/// Solves for the fundamental interval of `prefix` exactly.
///
/// Writing `t_{j-1} = (A alpha + B)/(C alpha + D)`, digit `j` can only change
/// where `t_{j-1}` vanishes or has a pole, or where `1/|t_{j-1}| + 1 - alpha`
/// hits `a_j` or `a_j + 1`, i.e. at roots of
/// `A x^2 + (B + (m-1) A - eps C) x + ((m-1) B - eps D)`. The predicate is
/// tested exactly at every such root in `(0, 1]` and at a rational inside
/// every gap; the answer must be one run of `true`.
pub fn fundamental_interval(prefix: &[SignedDigit]) -> Result<FundamentalInterval> {
    if prefix.is_empty() {
        return Err(Error::UnsupportedPrefix("empty prefix".into()));
    }
    let zero = QuadSurd::zero();
    let one = QuadSurd::one();
    let mut crit = vec![one.clone()];
    let mut m = Mobius::identity();
    for d in prefix {
        let eps = BigInt::from(d.eps);
        let mut cands = roots(&BigInt::zero(), &m.a, &m.b)?;
        cands.extend(roots(&BigInt::zero(), &m.c, &m.d)?);
        for q in [d.a, d.a + 1] {
            let q1 = BigInt::from(q) - 1;
            let b = &m.b + &q1 * &m.a - &eps * &m.c;
            let c = &q1 * &m.b - &eps * &m.d;
            cands.extend(roots(&m.a, &b, &c)?);
        }
        crit.extend(cands.into_iter().filter(|x| x > &zero && x <= &one));
        let a = BigInt::from(d.a);
        m = Mobius::new(&eps * &m.c - &a * &m.a, &eps * &m.d - &a * &m.b, m.a.clone(), m.b.clone());
    }
    crit.sort();
    crit.dedup();

    // alternate gaps and points: gap(0, c0), c0, gap(c0, c1), c1, ...
    let mut cells: Vec<(QuadSurd, QuadSurd, bool, bool)> = Vec::new(); // (lo, hi, is_point, truth)
    let mut prev = zero.clone();
    for c in &crit {
        let mid = rational_between(&prev, c);
        cells.push((prev.clone(), c.clone(), false, starts_with(&mid, prefix)));
        cells.push((c.clone(), c.clone(), true, starts_with(c, prefix)));
        prev = c.clone();
    }
    let hits: Vec<usize> = (0..cells.len()).filter(|&i| cells[i].3).collect();
    let (Some(&first), Some(&last)) = (hits.first(), hits.last()) else {
        return Err(Error::UnsupportedPrefix(format!("no alpha in (0, 1] has an expansion starting {prefix:?}")));
    };
    if last - first + 1 != hits.len() || (first == last && cells[first].2) {
        return Err(Error::UnsupportedPrefix("the solution set is not a single interval".into()));
    }
    let (f, l) = (&cells[first], &cells[last]);
    Ok(FundamentalInterval { lo: f.0.clone(), hi: l.1.clone(), lo_closed: f.2, hi_closed: l.2 })
}

/// Positive root of `f_k(x) = h^k(1/x) - x - 2` with `h(y) = 1/(3 - y)`,
/// i.e. `1/(3 - 1/(3 - ... 1/(3 - 1/x)))` with `k` threes.
pub fn rk(k: u32) -> Result<QuadSurd> {
    let m = Mobius::new(0, 1, -1, 3).pow(k).compose(&Mobius::new(0, 1, 1, 0));
    // (a x + b) = (x + 2)(c x + d)
    let qa = m.c.clone();
    let qb = &m.d + BigInt::from(2) * &m.c - &m.a;
    let qc = BigInt::from(2) * &m.d - &m.b;
    roots(&qa, &qb, &qc)?
        .into_iter()
        .filter(|x| x.signum() > 0)
        .max()
        .ok_or_else(|| Error::Domain(format!("f_{k} has no positive root")))
}

/// `(sqrt(F_{2k+1} F_{2k+3}) - F_{2k+1}) / F_{2k+2}`.
pub fn rk_closed_form(k: u32) -> Result<QuadSurd> {
    let k = k as i64;
    let (a, b, c) = (fib(2 * k + 1), fib(2 * k + 2), fib(2 * k + 3));
    let d = u64::try_from(&a * &c).map_err(|_| Error::Domain("radicand exceeds 64 bits".into()))?;
    QuadSurd::new(-a, 1, b, d)
}

/// `[0; 3, period (-3)^k, -2, (-3)^k, -4]`.
pub fn rk_self_expansion(k: usize) -> Expansion {
    let n3 = SignedDigit::neg(3);
    let mut period = vec![n3; k];
    period.push(SignedDigit::neg(2));
    period.extend(std::iter::repeat_n(n3, k));
    period.push(SignedDigit::neg(4));
    Expansion::periodic(vec![SignedDigit::pos(3)], period).expect("nonempty period")
}
