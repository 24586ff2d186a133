//! Biquadratic values `u + w*sqrt(D)` with `u, w, D` in one quadratic field.
//!
//! Only the Legendre-constant boundaries need this: the threshold where the
//! `1 - alpha` and `alpha / (1 + g alpha)` formulas meet is a root of a
//! quadratic over `Q(sqrt 5)`, and `alpha / (1 + g alpha)` mixes fields when
//! `alpha` is a surd other than a `Q(sqrt 5)` one.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::surd::QuadSurd;

/// `u + w*sqrt(dd)` over the base field `Q(sqrt base)`.
///
/// `dd` is `None` exactly when `w` is zero. `dd` must be positive and a
/// non-square in the base field; equality tests rely on that.
#[derive(Clone, PartialEq, Eq)]
pub struct Tower {
    base: u64,
    u: QuadSurd,
    w: QuadSurd,
    dd: Option<QuadSurd>,
}

impl Tower {
    pub fn pure(x: QuadSurd) -> Self {
        Tower { base: x.field(), u: x, w: QuadSurd::zero(), dd: None }
    }

    /// `u + w*sqrt(dd)` with all three in one quadratic field.
    pub fn new(u: QuadSurd, w: QuadSurd, dd: QuadSurd) -> Result<Self> {
        let mut base = 0;
        for x in [&u, &w, &dd] {
            if x.field() != 0 {
                if base != 0 && base != x.field() {
                    return Err(Error::FieldMismatch { left: base, right: x.field() });
                }
                base = x.field();
            }
        }
        if dd.signum() <= 0 {
            return Err(Error::Domain("tower radicand must be positive".into()));
        }
        if w.is_zero() {
            return Ok(Tower { base: u.field(), u, w, dd: None });
        }
        Ok(Tower { base, u, w, dd: Some(dd) })
    }

    pub fn u(&self) -> &QuadSurd {
        &self.u
    }

    pub fn w(&self) -> &QuadSurd {
        &self.w
    }

    pub fn radicand(&self) -> Option<&QuadSurd> {
        self.dd.as_ref()
    }

    /// The value as a quadratic surd when it has no `sqrt(dd)` part.
    pub fn as_quad(&self) -> Option<&QuadSurd> {
        self.w.is_zero().then_some(&self.u)
    }

    fn relift(x: &QuadSurd, base: u64, dd: Option<&QuadSurd>) -> Result<Tower> {
        if x.field() == 0 || x.field() == base {
            return Ok(Tower { base, u: x.clone(), w: QuadSurd::zero(), dd: dd.cloned() });
        }
        let want = QuadSurd::from_int(x.field() as i64);
        match dd {
            Some(d) if *d == want => {}
            None => {}
            _ => return Err(Error::FieldMismatch { left: base, right: x.field() }),
        }
        let r = QuadSurd::from_int(x.r().clone());
        let u = QuadSurd::from_int(x.p().clone()) / &r;
        let w = QuadSurd::from_int(x.q().clone()) / &r;
        Ok(Tower { base, u, w, dd: Some(want) })
    }

    /// Re-expresses both operands over one base field and one radicand.
    fn unify(a: &Tower, b: &Tower) -> Result<(Tower, Tower)> {
        match (a.dd.is_none(), b.dd.is_none()) {
            (true, true) => {
                let (fa, fb) = (a.u.field(), b.u.field());
                if a.u.compatible(&b.u) {
                    let base = fa.max(fb);
                    let mut a2 = a.clone();
                    let mut b2 = b.clone();
                    a2.base = base;
                    b2.base = base;
                    return Ok((a2, b2));
                }
                // canonical choice: smaller field as base, larger as radicand
                let base = fa.min(fb);
                let dd = QuadSurd::from_int(fa.max(fb) as i64);
                Ok((Self::relift(&a.u, base, Some(&dd))?, Self::relift(&b.u, base, Some(&dd))?))
            }
            (true, false) => Ok((Self::relift(&a.u, b.base, b.dd.as_ref())?, b.clone())),
            (false, true) => Ok((a.clone(), Self::relift(&b.u, a.base, a.dd.as_ref())?)),
            (false, false) => {
                if a.base != b.base || a.dd != b.dd {
                    return Err(Error::FieldMismatch { left: a.base, right: b.base });
                }
                Ok((a.clone(), b.clone()))
            }
        }
    }

    fn build(base: u64, u: QuadSurd, w: QuadSurd, dd: Option<QuadSurd>) -> Tower {
        if w.is_zero() {
            let base = u.field();
            Tower { base, u, w, dd: None }
        } else {
            Tower { base, u, w, dd }
        }
    }

    pub fn add(&self, o: &Tower) -> Result<Tower> {
        let (a, b) = Self::unify(self, o)?;
        let dd = a.dd.clone().or(b.dd.clone());
        Ok(Self::build(a.base, a.u.checked_add(&b.u)?, a.w.checked_add(&b.w)?, dd))
    }

    pub fn neg(&self) -> Tower {
        Tower { base: self.base, u: -&self.u, w: -&self.w, dd: self.dd.clone() }
    }

    pub fn sub(&self, o: &Tower) -> Result<Tower> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Tower) -> Result<Tower> {
        let (a, b) = Self::unify(self, o)?;
        let dd = a.dd.clone().or(b.dd.clone());
        let d = dd.clone().unwrap_or_else(QuadSurd::zero);
        let u = a.u.checked_mul(&b.u)?.checked_add(&a.w.checked_mul(&b.w)?.checked_mul(&d)?)?;
        let w = a.u.checked_mul(&b.w)?.checked_add(&a.w.checked_mul(&b.u)?)?;
        Ok(Self::build(a.base, u, w, dd))
    }

    pub fn recip(&self) -> Result<Tower> {
        match &self.dd {
            None => Ok(Tower::pure(self.u.recip()?)),
            Some(d) => {
                // (u - w sqrt D) / (u^2 - w^2 D)
                let n = self.u.checked_mul(&self.u)?.checked_sub(&self.w.checked_mul(&self.w)?.checked_mul(d)?)?;
                let ni = n.recip()?;
                Ok(Self::build(self.base, self.u.checked_mul(&ni)?, (-&self.w).checked_mul(&ni)?, Some(d.clone())))
            }
        }
    }

    pub fn div(&self, o: &Tower) -> Result<Tower> {
        // unify first so the reciprocal lands in the shared tower
        let (a, b) = Self::unify(self, o)?;
        a.mul(&b.recip()?)
    }

    pub fn signum(&self) -> i8 {
        let su = self.u.signum();
        let Some(d) = &self.dd else { return su };
        let sw = self.w.signum();
        if sw == 0 {
            return su;
        }
        if su == 0 || su == sw {
            return sw;
        }
        let t = (&self.u * &self.u - &self.w * &self.w * d).signum();
        match t {
            1 => su,
            -1 => sw,
            _ => 0,
        }
    }

    pub fn compare(&self, o: &Tower) -> Result<Ordering> {
        Ok(self.sub(o)?.signum().cmp(&0))
    }

    pub fn eq_value(&self, o: &Tower) -> Result<bool> {
        Ok(self.compare(o)? == Ordering::Equal)
    }

    /// Floating approximation, good to a few ulps.
    pub fn to_f64(&self) -> f64 {
        match &self.dd {
            None => self.u.to_f64(),
            Some(d) => self.u.to_f64() + self.w.to_f64() * d.to_f64().sqrt(),
        }
    }
}

impl From<QuadSurd> for Tower {
    fn from(x: QuadSurd) -> Self {
        Tower::pure(x)
    }
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.dd {
            None => write!(f, "{}", self.u),
            Some(d) => write!(f, "{} + ({})·√({})", self.u, self.w, d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::consts;

    #[test]
    fn gtilde_is_root_of_its_quadratic() {
        let gt = consts::gtilde();
        let g = Tower::pure(consts::g());
        // g x^2 + (2 - g) x - 1 = 0
        let two_minus_g = Tower::pure(QuadSurd::from_int(2) - consts::g());
        let val = g
            .mul(&gt)
            .unwrap()
            .mul(&gt)
            .unwrap()
            .add(&two_minus_g.mul(&gt).unwrap())
            .unwrap()
            .sub(&Tower::pure(QuadSurd::one()))
            .unwrap();
        assert_eq!(val.signum(), 0);
        assert!((gt.to_f64() - 0.5754).abs() < 1e-3);
    }

    #[test]
    fn mixed_fields_via_tower() {
        let s2 = Tower::pure(QuadSurd::sqrt_int(2));
        let s3 = Tower::pure(QuadSurd::sqrt_int(3));
        let sum = s2.add(&s3).unwrap();
        assert!((sum.to_f64() - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-12);
        let prod = s2.mul(&s3).unwrap();
        // sqrt 6 ~ 2.449
        assert_eq!(prod.compare(&Tower::pure(QuadSurd::ratio(2449, 1000))).unwrap(), Ordering::Greater);
        assert_eq!(prod.compare(&Tower::pure(QuadSurd::ratio(2450, 1000))).unwrap(), Ordering::Less);
        let q = sum.div(&s2).unwrap();
        // 1 + sqrt(3/2)
        assert!((q.to_f64() - (1.0 + 1.5f64.sqrt())).abs() < 1e-12);
        assert_eq!(q.mul(&s2).unwrap().sub(&sum).unwrap().signum(), 0);
    }
}
