//! The two-dimensional natural extension `(t, v) -> (T t, 1/(a + eps v))`.

use serde::{Deserialize, Serialize};

use crate::cf::{check_interval, digit, digit_unchecked, SignedDigit};
use crate::domain::{build_domain, Membership};
use crate::error::{Error, Result};
use crate::exact::QuadSurd;

/// A future `t` and a past `v`; along an orbit started at `(x, 0)`,
/// `v_n = q_{n-1} / q_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NatExtPoint {
    pub t: QuadSurd,
    pub v: QuadSurd,
}

impl NatExtPoint {
    pub fn new(t: QuadSurd, v: QuadSurd) -> Self {
        NatExtPoint { t, v }
    }

    /// `(x, 0)`, the start of every orbit.
    pub fn seed(x: QuadSurd) -> Self {
        NatExtPoint { t: x, v: QuadSurd::zero() }
    }

    /// `theta_{n-1} = v / (1 + t v)`.
    pub fn theta_prev(&self) -> QuadSurd {
        let den = QuadSurd::one() + &self.t * &self.v;
        &self.v / &den
    }
}

pub fn nat_ext_step(pt: &NatExtPoint, alpha: &QuadSurd) -> Result<NatExtPoint> {
    let d = digit(&pt.t, alpha)?;
    Ok(step_with(pt, d))
}

fn step_with(pt: &NatExtPoint, d: SignedDigit) -> NatExtPoint {
    let t = pt.t.recip().expect("nonzero").abs() - QuadSurd::from_int(d.a);
    let den = QuadSurd::from_int(d.a) + &pt.v * &QuadSurd::from_int(d.eps as i64);
    NatExtPoint { t, v: den.recip().expect("positive denominator") }
}

/// Left inverse of [`nat_ext_step`]: `(eps/(t + a), eps/v - eps a)`.
///
/// The past digit is read from `v`: `1/v = a + eps v'` leaves two candidates,
/// `(+1, floor(1/v))` and `(-1, floor(1/v) + 1)`. A candidate survives if
/// `v'` is in `[0, 1]` and stepping its preimage forward reproduces the
/// digit. When both survive, membership in the closed-form domain for
/// `alpha` decides; if that cannot, the past is reported ambiguous.
pub fn nat_ext_inverse(pt: &NatExtPoint, alpha: &QuadSurd) -> Result<NatExtPoint> {
    if pt.v.is_zero() {
        return Err(Error::ZeroInput);
    }
    if pt.v.signum() < 0 || pt.v > QuadSurd::one() {
        return Err(Error::InvalidPast(format!("v = {} is outside (0, 1]", pt.v)));
    }
    check_interval(&pt.t, alpha)?;
    let inv = pt.v.recip()?;
    let fl = inv.floor();
    let a0: u64 = fl.try_into().map_err(|_| Error::InvalidPast("past digit too large".into()))?;
    let mut found = Vec::new();
    for d in [SignedDigit::pos(a0), SignedDigit::neg(a0 + 1)] {
        if d.a == 0 {
            continue;
        }
        let eps = QuadSurd::from_int(d.eps as i64);
        let a = QuadSurd::from_int(d.a);
        let v_prev = &eps * &(&inv - &a);
        if v_prev.signum() < 0 || v_prev > QuadSurd::one() {
            continue;
        }
        let den = &pt.t + &a;
        if den.is_zero() {
            continue;
        }
        let t_prev = &eps / &den;
        if check_interval(&t_prev, alpha).is_err() || digit_unchecked(&t_prev, alpha) != d {
            continue;
        }
        found.push(NatExtPoint { t: t_prev, v: v_prev });
    }
    match found.len() {
        0 => Err(Error::InvalidPast(format!("no digit maps onto ({}, {})", pt.t, pt.v))),
        1 => Ok(found.pop().unwrap()),
        _ => disambiguate(found, alpha),
    }
}

fn disambiguate(found: Vec<NatExtPoint>, alpha: &QuadSurd) -> Result<NatExtPoint> {
    let dom = build_domain(alpha, 8)
        .map_err(|e| Error::InvalidPast(format!("two past digits fit and no domain separates them: {e}")))?;
    let mut inside: Vec<NatExtPoint> =
        found.into_iter().filter(|p| dom.contains_exact(p) == Membership::Inside).collect();
    match inside.len() {
        1 => Ok(inside.pop().unwrap()),
        _ => Err(Error::InvalidPast("the past digit is ambiguous".into())),
    }
}
