//! The invariant measure `m(D) = integral of dt dv / (1 + t v)^2` on rectangles.
//!
//! For `D = [t1, t2] x [v1, v2]`,
//! `m(D) = log((1 + t2 v2)(1 + t1 v1) / ((1 + t2 v1)(1 + t1 v2)))`.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{build_domain, pell_families, regime_of, Rect, Regime};
use crate::cf::digit;
use crate::error::{Error, Result};
use crate::exact::{consts, Interval, QuadSurd};

const BITS: u32 = 128;

/// Certified `f64` enclosure `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

impl Enclosure {
    pub fn zero() -> Self {
        Enclosure { lo: 0.0, hi: 0.0 }
    }

    pub fn add(&self, o: &Enclosure) -> Enclosure {
        Enclosure { lo: (self.lo + o.lo).next_down(), hi: (self.hi + o.hi).next_up() }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

fn approx(x: &QuadSurd) -> Interval {
    x.approx_unchecked(BITS)
}

fn one_plus(t: &Interval, v: &Interval) -> Interval {
    Interval::point(BigRational::one()).add(&t.mul(v))
}

/// Measure of `[t1, t2] x [v1, v2]` from endpoint values.
pub(crate) fn rect_measure_raw(t1: &QuadSurd, t2: &QuadSurd, v1: &QuadSurd, v2: &QuadSurd) -> Result<Enclosure> {
    if t1 >= t2 || v1 >= v2 {
        return Ok(Enclosure::zero());
    }
    let (t1, t2, v1, v2) = (approx(t1), approx(t2), approx(v1), approx(v2));
    let c = [one_plus(&t2, &v2), one_plus(&t1, &v1), one_plus(&t2, &v1), one_plus(&t1, &v2)];
    if c.iter().any(|x| !x.is_positive()) {
        return Err(Error::Domain("1 + t v is not positive at a corner".into()));
    }
    let num = c[0].mul(&c[1]);
    let den = c[2].mul(&c[3]);
    let ratio = num.div(&den).expect("positive denominator").round_out(BITS);
    let minus_one = ratio.sub(&Interval::point(BigRational::one()));
    let (lo, hi) = minus_one.to_f64_bounds();
    let lo = lo.ln_1p().next_down().next_down().max(0.0);
    let hi = hi.ln_1p().next_up().next_up();
    Ok(Enclosure { lo, hi })
}

/// `m(rect)`, certified. Degenerate rectangles have measure zero.
pub fn rect_measure(r: &Rect) -> Result<Enclosure> {
    rect_measure_raw(&r.t_lo, &r.t_hi, &r.v_lo, &r.v_hi)
}

/// The argument of the logarithm in `m(rect)`, exactly, when all corner
/// products live in one quadratic field.
pub fn log_argument(r: &Rect) -> Option<QuadSurd> {
    let f =
        |t: &QuadSurd, v: &QuadSurd| -> Option<QuadSurd> { t.checked_mul(v).ok()?.checked_add(&QuadSurd::one()).ok() };
    let num = f(&r.t_hi, &r.v_hi)?.checked_mul(&f(&r.t_lo, &r.v_lo)?).ok()?;
    let den = f(&r.t_hi, &r.v_lo)?.checked_mul(&f(&r.t_lo, &r.v_hi)?).ok()?;
    num.checked_div(&den).ok()
}

/// Image of a rectangle under the natural extension, valid when the open
/// `t`-range carries one digit (the closed ends may sit on cylinder cuts).
pub fn push_rect(r: &Rect, alpha: &QuadSurd) -> Result<Rect> {
    let mid =
        r.t_lo.checked_add(&r.t_hi).map_err(|_| Error::NotApplicable("t-range ends lie in different fields".into()))?
            * QuadSurd::ratio(1, 2);
    let d1 = digit(&mid, alpha)?;
    if r.t_lo.signum() * r.t_hi.signum() < 0 {
        return Err(Error::NotApplicable("rectangle straddles t = 0".into()));
    }
    // f(t) = 1/|t| + 1 - alpha must stay within [a, a + 1] on the range
    let f = |t: &QuadSurd| &(&t.recip().expect("nonzero").abs() + &QuadSurd::one()) - alpha;
    let (f0, f1) = (f(&r.t_lo), f(&r.t_hi));
    let (fmin, fmax) = if f0 <= f1 { (f0, f1) } else { (f1, f0) };
    if fmin < QuadSurd::from_int(d1.a) || fmax > QuadSurd::from_int(d1.a + 1) {
        return Err(Error::NotApplicable(format!("rectangle spans more than the cylinder of digit {d1}")));
    }
    let eps = QuadSurd::from_int(d1.eps as i64);
    let a = QuadSurd::from_int(d1.a);
    let ft = |t: &QuadSurd| &(&eps / t) - &a;
    let fv = |v: &QuadSurd| (&a + &(&eps * v)).recip().expect("positive");
    let (t0, t1) = (ft(&r.t_lo), ft(&r.t_hi));
    let (v0, v1) = (fv(&r.v_lo), fv(&r.v_hi));
    let e = r.edges;
    let mut out = r.clone();
    // t -> eps/t - a is decreasing for t > 0, increasing for t < 0; v -> 1/(a + eps v) the reverse
    if d1.eps > 0 {
        (out.t_lo, out.t_hi, out.edges.t_lo, out.edges.t_hi) = (t1, t0, e.t_hi, e.t_lo);
        (out.v_lo, out.v_hi, out.edges.v_lo, out.edges.v_hi) = (v1, v0, e.v_hi, e.v_lo);
    } else {
        (out.t_lo, out.t_hi) = (t0, t1);
        (out.v_lo, out.v_hi) = (v0, v1);
    }
    Ok(out)
}

/// Cuts a rectangle at the cylinder boundaries `|t| = 1/(a - 1 + alpha)`
/// so that each piece carries a single digit. The `t`-range must not
/// contain 0.
pub fn split_by_cylinder(r: &Rect, alpha: &QuadSurd) -> Result<Vec<Rect>> {
    if r.t_lo.signum() * r.t_hi.signum() <= 0 {
        return Err(Error::NotApplicable("rectangle touches t = 0".into()));
    }
    let (near, far) = if r.t_lo.signum() > 0 { (&r.t_lo, &r.t_hi) } else { (&r.t_hi, &r.t_lo) };
    let lo_digit = digit(far, alpha)?.a;
    let hi_digit = digit(near, alpha)?.a;
    let sign = QuadSurd::from_int(r.t_lo.signum() as i64);
    let mut cuts: Vec<QuadSurd> = (lo_digit + 1..=hi_digit)
        .map(|a| &sign * &(&QuadSurd::from_int(a - 1) + alpha).recip().expect("positive"))
        .filter(|c| c > &r.t_lo && c < &r.t_hi)
        .collect();
    cuts.sort();
    let mut out = Vec::new();
    let mut lo = r.t_lo.clone();
    for c in cuts.into_iter().chain(std::iter::once(r.t_hi.clone())) {
        out.push(Rect { t_lo: lo, t_hi: c.clone(), ..r.clone() });
        lo = c;
    }
    Ok(out)
}

/// Bound on the measure of the family members with `k > K`.
///
/// Member `k` of family `i` is `I_i x S_i P^k(J)`. On `[0, 1]` the slope of
/// `P^k` is at most `1/E_{2k+1}^2` and that of `S_i` at most `1/25`, `1/4`,
/// `1`; the density is at most `1/alpha^2`; and `E_{2k+3} >= 5 E_{2k+1}`
/// makes the sum over `k > K` at most `(25/24) / E_{2K+3}^2`.
pub fn tail_bound(alpha: &QuadSurd, k_max: usize) -> Result<f64> {
    match regime_of(alpha)? {
        Regime::PellFamilies | Regime::PellEnd => {}
        _ => return Ok(0.0),
    }
    let jw = consts::g2().to_f64() + (consts::g().to_f64() - 0.5);
    let slope = [1.0 / 25.0, 1.0 / 4.0, 1.0];
    let e = super::eseq(2 * k_max as i64 + 3).to_f64().unwrap_or(f64::INFINITY);
    let a = alpha.to_f64();
    let mut total = 0.0;
    for ((_, (t0, t1), _), s) in pell_families(alpha).into_iter().zip(slope) {
        let w = (t1.to_f64() - t0.to_f64()).abs();
        total += w * s * jw;
    }
    Ok(total / (a * a) * (25.0 / 24.0) / (e * e) * (1.0 + 1e-9))
}

/// Normalising constant and its certified error budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    /// Sum over the materialised rectangles.
    pub value: Enclosure,
    /// Upper bound on the measure of the omitted family members.
    pub tail: f64,
}

impl Normalizer {
    /// Interval certain to contain the full (untruncated) constant.
    pub fn bracket(&self) -> Enclosure {
        Enclosure { lo: self.value.lo, hi: self.value.hi + self.tail }
    }
}

pub fn normalizer(alpha: &QuadSurd, k_max: usize) -> Result<Normalizer> {
    let dom = build_domain(alpha, k_max)?;
    let mut acc = Enclosure::zero();
    for r in &dom.rects {
        acc = acc.add(&rect_measure(r)?);
    }
    Ok(Normalizer { value: acc, tail: tail_bound(alpha, k_max)? })
}
