//! Closed-form natural-extension domains, their measure, the staged
//! construction by removing and adding strips, and fundamental intervals.

mod fundamental;
mod index;
mod measure;
mod quilt;
mod region;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use fundamental::{fundamental_interval, rk, rk_closed_form, rk_self_expansion, FundamentalInterval};
pub use index::RectIndex;
pub use measure::{
    log_argument, normalizer, push_rect, rect_measure, split_by_cylinder, tail_bound, Enclosure, Normalizer,
};
pub use quilt::{quilt_domain, quilt_stage, QuiltStage};
pub use region::Region;

use crate::cf::NatExtPoint;
use crate::error::{Error, Result};
use crate::exact::{consts, QuadSurd};
use crate::mobius::Mobius;

/// Closed (`true`) or open flag for each edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edges {
    pub t_lo: bool,
    pub t_hi: bool,
    pub v_lo: bool,
    pub v_hi: bool,
}

impl Edges {
    /// Reads interval notation for `t` then `v`, e.g. `"[)[]"`.
    pub fn parse(s: &str) -> Result<Self> {
        let c: Vec<char> = s.chars().collect();
        if c.len() != 4
            || !matches!(c[0], '[' | '(')
            || !matches!(c[1], ']' | ')')
            || !matches!(c[2], '[' | '(')
            || !matches!(c[3], ']' | ')')
        {
            return Err(Error::Parse(format!("bad edge flags `{s}`")));
        }
        Ok(Edges { t_lo: c[0] == '[', t_hi: c[1] == ']', v_lo: c[2] == '[', v_hi: c[3] == ']' })
    }

    fn flip_v(self) -> Self {
        Edges { v_lo: self.v_hi, v_hi: self.v_lo, ..self }
    }
}

impl fmt::Display for Edges {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = |b: bool, c: char, oc: char| if b { c } else { oc };
        write!(
            f,
            "{}{}{}{}",
            o(self.t_lo, '[', '('),
            o(self.t_hi, ']', ')'),
            o(self.v_lo, '[', '('),
            o(self.v_hi, ']', ')')
        )
    }
}

/// Axis-parallel rectangle in the `(t, v)` plane.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub t_lo: QuadSurd,
    pub t_hi: QuadSurd,
    pub v_lo: QuadSurd,
    pub v_hi: QuadSurd,
    pub edges: Edges,
    /// Which strip or family the rectangle comes from.
    pub family: String,
    /// Index within an infinite family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

fn in_range(x: &QuadSurd, lo: &QuadSurd, hi: &QuadSurd, lo_closed: bool, hi_closed: bool) -> bool {
    let above = if lo_closed { x >= lo } else { x > lo };
    let below = if hi_closed { x <= hi } else { x < hi };
    above && below
}

impl Rect {
    pub fn new(t_lo: QuadSurd, t_hi: QuadSurd, v_lo: QuadSurd, v_hi: QuadSurd, edges: &str, family: &str) -> Self {
        Rect {
            t_lo,
            t_hi,
            v_lo,
            v_hi,
            edges: Edges::parse(edges).expect("edge literal"),
            family: family.to_string(),
            k: None,
        }
    }

    pub(crate) fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    /// `t`-range times the image of `[v_lo, v_hi)` under `m`; a decreasing
    /// `m` swaps the open and closed ends.
    pub(crate) fn band(
        t_lo: QuadSurd,
        t_hi: QuadSurd,
        m: &Mobius,
        v: (&QuadSurd, &QuadSurd),
        edges: &str,
        family: &str,
    ) -> Self {
        let a = m.apply(v.0).finite().expect("band endpoint is finite");
        let b = m.apply(v.1).finite().expect("band endpoint is finite");
        let e = Edges::parse(edges).expect("edge literal");
        if a <= b {
            Rect { t_lo, t_hi, v_lo: a, v_hi: b, edges: e, family: family.into(), k: None }
        } else {
            Rect { t_lo, t_hi, v_lo: b, v_hi: a, edges: e.flip_v(), family: family.into(), k: None }
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.t_lo >= self.t_hi || self.v_lo >= self.v_hi
    }

    /// Membership respecting the edge flags.
    pub fn contains(&self, t: &QuadSurd, v: &QuadSurd) -> bool {
        let e = self.edges;
        in_range(t, &self.t_lo, &self.t_hi, e.t_lo, e.t_hi) && in_range(v, &self.v_lo, &self.v_hi, e.v_lo, e.v_hi)
    }

    /// Membership in the closed rectangle.
    pub fn closure_contains(&self, t: &QuadSurd, v: &QuadSurd) -> bool {
        in_range(t, &self.t_lo, &self.t_hi, true, true) && in_range(v, &self.v_lo, &self.v_hi, true, true)
    }

    pub fn to_f64(&self) -> [f64; 4] {
        [self.t_lo.to_f64(), self.t_hi.to_f64(), self.v_lo.to_f64(), self.v_hi.to_f64()]
    }
}

/// Which closed form a domain comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `alpha = 1`.
    Unit,
    /// `alpha in (g, 1)`.
    AboveG,
    /// `alpha in (1/2, g]`.
    HalfToG,
    /// `alpha = 1/2`.
    Half,
    /// `alpha in (sqrt2 - 1, 1/2)`.
    SilverToHalf,
    /// `alpha = sqrt2 - 1`.
    Silver,
    /// `alpha in ((sqrt10 - 2)/3, sqrt2 - 1)`, with infinite families.
    PellFamilies,
    /// `alpha = (sqrt10 - 2)/3`, the lowest point of the family formula.
    PellEnd,
    /// Bottom strip of the domain at `alpha = 1/r`.
    BottomOneOverR(u32),
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Unit => write!(f, "unit"),
            Regime::AboveG => write!(f, "(g,1)"),
            Regime::HalfToG => write!(f, "(1/2,g]"),
            Regime::Half => write!(f, "{{1/2}}"),
            Regime::SilverToHalf => write!(f, "(sqrt2-1,1/2)"),
            Regime::Silver => write!(f, "{{sqrt2-1}}"),
            Regime::PellFamilies => write!(f, "((sqrt10-2)/3,sqrt2-1)"),
            Regime::PellEnd => write!(f, "{{(sqrt10-2)/3}}"),
            Regime::BottomOneOverR(r) => write!(f, "bottom-1/{r}"),
        }
    }
}

/// Exact membership verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Outside,
    Boundary,
}

/// Finite union of rectangles describing (a truncation of) a domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectUnion {
    pub alpha: QuadSurd,
    pub regime: Regime,
    /// Number of members kept from each infinite family (`k = 0..=K`);
    /// zero when the domain is a finite union.
    pub truncation_depth: usize,
    pub rects: Vec<Rect>,
    /// Closed hulls, as rectangles, of every omitted family member.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tail_hulls: Vec<Rect>,
}

impl RectUnion {
    /// Exact verdict for an exact point: `Inside` if some rectangle contains
    /// it under its edge flags, `Boundary` if it only touches a closure or
    /// lies where truncated families live, `Outside` otherwise.
    pub fn contains_exact(&self, pt: &NatExtPoint) -> Membership {
        if self.rects.iter().any(|r| r.contains(&pt.t, &pt.v)) {
            return Membership::Inside;
        }
        if self.rects.iter().chain(&self.tail_hulls).any(|r| r.closure_contains(&pt.t, &pt.v)) {
            return Membership::Boundary;
        }
        Membership::Outside
    }

    /// Float verdict with a tolerance shell, see [`RectIndex::classify`].
    pub fn contains_f64(&self, t: f64, v: f64, tol: f64) -> Membership {
        RectIndex::new(self).classify(t, v, tol)
    }

    /// Canonical slab form (edge flags and degenerate pieces dropped).
    pub fn region(&self) -> Region {
        Region::from_rects(&self.rects)
    }
}

/// `F_n` for `n >= -1` (`F_{-1} = 1`).
pub fn fib(n: i64) -> BigInt {
    assert!(n >= -1, "fib needs n >= -1");
    if n == -1 {
        return BigInt::one();
    }
    let (mut a, mut b) = (BigInt::one(), BigInt::zero());
    for _ in 0..n {
        let c = &a + &b;
        a = b;
        b = c;
    }
    b
}

/// `E_n` with `E_{-1} = 1`, `E_0 = 0`, `E_{n+1} = 2 E_n + E_{n-1}`.
pub fn eseq(n: i64) -> BigInt {
    assert!(n >= -1, "eseq needs n >= -1");
    if n == -1 {
        return BigInt::one();
    }
    let (mut a, mut b) = (BigInt::one(), BigInt::zero());
    for _ in 0..n {
        let c = BigInt::from(2) * &b + &a;
        a = b;
        b = c;
    }
    b
}

/// Limit of `M^k(v)` as `k` grows: the attracting fixed point.
pub fn matrix_power_limit(m: &Mobius) -> Result<QuadSurd> {
    m.attracting_fixed_point()
}

pub(crate) fn one() -> QuadSurd {
    QuadSurd::one()
}

pub(crate) fn half() -> QuadSurd {
    QuadSurd::ratio(1, 2)
}

/// `(1 - 2a)/a`.
pub(crate) fn r12a(a: &QuadSurd) -> QuadSurd {
    (one() - a * 2) / a
}

/// `(1 - 2a)/(a - 1)`.
pub(crate) fn r12am1(a: &QuadSurd) -> QuadSurd {
    (one() - a * 2) / (a - &one())
}

/// The regime whose closed form covers `alpha`.
pub fn regime_of(alpha: &QuadSurd) -> Result<Regime> {
    if alpha.signum() <= 0 || *alpha > one() {
        return Err(Error::Domain(format!("alpha = {alpha} is outside (0, 1]")));
    }
    let s2 = consts::sqrt2m1();
    let s10 = consts::s10();
    Ok(if *alpha == one() {
        Regime::Unit
    } else if *alpha > consts::g() {
        Regime::AboveG
    } else if *alpha > half() {
        Regime::HalfToG
    } else if *alpha == half() {
        Regime::Half
    } else if *alpha > s2 {
        Regime::SilverToHalf
    } else if *alpha == s2 {
        Regime::Silver
    } else if *alpha > s10 {
        Regime::PellFamilies
    } else if *alpha == s10 {
        Regime::PellEnd
    } else {
        return Err(Error::UnsupportedAlpha(format!("no closed-form domain below (sqrt10-2)/3; alpha = {alpha}")));
    })
}

/// Exact (truncated) domain for `alpha` in `[(sqrt10-2)/3, 1]`. `k_max` is
/// the number of members kept from each infinite family beyond `k = 0`.
pub fn build_domain(alpha: &QuadSurd, k_max: usize) -> Result<RectUnion> {
    let regime = regime_of(alpha)?;
    domain_formula(regime, alpha, k_max)
}

/// The closed form of `regime` evaluated at `alpha`, without checking that
/// `alpha` lies in the regime. Evaluating two neighbouring formulas at their
/// common boundary is how seams are compared.
pub fn domain_formula(regime: Regime, alpha: &QuadSurd, k_max: usize) -> Result<RectUnion> {
    let a = alpha;
    let g = consts::g();
    let g2 = consts::g2();
    let zero = QuadSurd::zero;
    let mut tail_hulls = Vec::new();
    let mut depth = 0;
    let rects = match regime {
        Regime::Unit => vec![Rect::new(zero(), one(), zero(), one(), "[)[]", "square")],
        Regime::AboveG => {
            let c = (one() - a) / a;
            vec![
                Rect::new(a - &one(), zero(), zero(), half(), "[)[]", "left"),
                Rect::new(zero(), c.clone(), zero(), half(), "[][)", "middle"),
                Rect::new(c, a.clone(), zero(), one(), "()[]", "right"),
            ]
        }
        Regime::HalfToG => {
            let (c1, c2) = (r12a(a), r12am1(a));
            vec![
                Rect::new(a - &one(), -g2.clone(), zero(), g2.clone(), "[)[)", "far-left"),
                Rect::new(-g2.clone(), c1.clone(), zero(), g2.clone(), "[][]", "left"),
                Rect::new(c1, zero(), zero(), half(), "()[]", "middle-left"),
                Rect::new(zero(), c2.clone(), zero(), half(), "[][)", "middle-right"),
                Rect::new(c2, a.clone(), zero(), g.clone(), "()[)", "right"),
            ]
        }
        Regime::Half => vec![
            Rect::new(QuadSurd::ratio(-1, 2), zero(), zero(), g2.clone(), "[][]", "left"),
            Rect::new(zero(), half(), zero(), g.clone(), "()[)", "right"),
        ],
        Regime::SilverToHalf => vec![
            Rect::new(a - &one(), a.clone(), zero(), g2.clone(), "[)[)", "lower"),
            Rect::new(r12a(a), a.clone(), g2.clone(), half(), "[)[)", "middle"),
            Rect::new(r12am1(a), a.clone(), half(), g.clone(), "[)[)", "upper"),
        ],
        Regime::Silver => {
            let s = consts::sqrt2m1();
            vec![
                Rect::new(&s - &one(), s.clone(), zero(), g2.clone(), "[)[)", "lower"),
                Rect::new(QuadSurd::new(-2, 1, 2, 2)?, s, half(), g.clone(), "[)[)", "upper"),
            ]
        }
        Regime::PellFamilies | Regime::PellEnd => {
            if k_max == 0 {
                return Err(Error::Domain("the family regime needs K >= 1".into()));
            }
            depth = k_max;
            let mut out = vec![
                Rect::new((one() - a * 3) / a, a.clone(), zero(), g2.clone(), "[)[)", "lower"),
                Rect::new((QuadSurd::from_int(2) - a * 5) / (a * 3 - 1), a.clone(), half(), g.clone(), "[)[)", "upper"),
            ];
            let p = Mobius::new(1, 2, 2, 5);
            for (name, (t0, t1), s) in pell_families(a) {
                let mut pk = Mobius::identity();
                for k in 0..=k_max {
                    let m = s.compose(&pk);
                    for (j0, j1) in [(zero(), g2.clone()), (half(), g.clone())] {
                        out.push(Rect::band(t0.clone(), t1.clone(), &m, (&j0, &j1), "[)[)", name).with_k(k));
                    }
                    pk = pk.compose(&p);
                }
                // every omitted member lies in S P^(K+1)([0, 1])
                tail_hulls.push(Rect::band(t0, t1, &s.compose(&pk), (&zero(), &one()), "[][]", name).with_k(k_max + 1));
            }
            out
        }
        Regime::BottomOneOverR(r) => return build_bottom_1_over_r(r),
    };
    Ok(RectUnion { alpha: a.clone(), regime, truncation_depth: depth, rects, tail_hulls })
}

/// The three `(name, t-range, S_i)` of the infinite families; member `k`
/// of family `i` is `t-range x S_i P^k(J)` with `J = [0, g^2) u [1/2, g)`.
pub(crate) fn pell_families(a: &QuadSurd) -> Vec<(&'static str, (QuadSurd, QuadSurd), Mobius)> {
    let one = one();
    let two = QuadSurd::from_int(2);
    vec![
        ("V1", ((&two - &(a * 5)) / (a * 2 - 1), a.clone()), Mobius::new(1, 2, 2, 5)),
        ("V2", (r12am1(a), (&two - &(a * 5)) / (a * 3 - 1)), Mobius::new(1, 1, 1, 2)),
        ("V3", (a - &one, (&one - &(a * 3)) / a), Mobius::new(1, 0, 1, 1)),
    ]
}

/// Bottom strip at `alpha = 1/r`: heights `L(1/r)` left of zero and
/// `(sqrt((r+1)^2 - 4) - r + 1) / (2r - 2)` right of it.
pub fn build_bottom_1_over_r(r: u32) -> Result<RectUnion> {
    if r < 3 {
        return Err(Error::Domain(format!("bottom strip needs r >= 3, got {r}")));
    }
    let r64 = r as i64;
    let disc = ((r64 + 1) * (r64 + 1) - 4) as u64;
    let left_h = QuadSurd::new(r64 + 1, -1, 2, disc)?;
    let right_h = QuadSurd::new(1 - r64, 1, 2 * r64 - 2, disc)?;
    let inv = QuadSurd::ratio(1, r64);
    let rects = vec![
        Rect::new(&inv - &one(), QuadSurd::zero(), QuadSurd::zero(), left_h, "[][]", "bottom-left"),
        Rect::new(QuadSurd::zero(), inv.clone(), QuadSurd::zero(), right_h, "[][]", "bottom-right"),
    ];
    Ok(RectUnion { alpha: inv, regime: Regime::BottomOneOverR(r), truncation_depth: 0, rects, tail_hulls: vec![] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences() {
        let f: Vec<BigInt> = (0..9).map(fib).collect();
        assert_eq!(f, [0, 1, 1, 2, 3, 5, 8, 13, 21].map(BigInt::from));
        let e: Vec<BigInt> = (1..=7).map(eseq).collect();
        assert_eq!(e, [1, 2, 5, 12, 29, 70, 169].map(BigInt::from));
        assert_eq!(eseq(-1), BigInt::one());
        assert_eq!(fib(-1), BigInt::one());
    }

    #[test]
    fn power_limits() {
        assert_eq!(matrix_power_limit(&Mobius::new(1, 1, 1, 2)).unwrap(), consts::g());
        assert_eq!(matrix_power_limit(&Mobius::new(1, 2, 2, 5)).unwrap(), consts::sqrt2m1());
        assert_eq!(matrix_power_limit(&Mobius::identity()), Err(Error::NoRealFixedPoint));
    }

    #[test]
    fn regimes_and_shapes() {
        let d = build_domain(&QuadSurd::ratio(4, 5), 1).unwrap();
        assert_eq!(d.regime, Regime::AboveG);
        assert_eq!(d.rects[1].t_hi, QuadSurd::ratio(1, 4));
        let d = build_domain(&QuadSurd::ratio(1, 2), 1).unwrap();
        assert_eq!(d.rects.len(), 2);
        let d = build_domain(&consts::sqrt2m1(), 1).unwrap();
        assert_eq!(d.regime, Regime::Silver);
        let d = build_domain(&QuadSurd::ratio(2, 5), 3).unwrap();
        assert_eq!(d.rects.len(), 2 + 3 * 4 * 2);
        assert!(matches!(build_domain(&QuadSurd::ratio(3, 8), 3), Err(Error::UnsupportedAlpha(_))));
    }

    #[test]
    fn family_anchor_k1() {
        // A-band at k = 1: [2/7, (2+g^2)/(7+3g^2)) and [5/17, (2+g)/(7+3g))
        let a = QuadSurd::ratio(2, 5);
        let d = build_domain(&a, 2).unwrap();
        let v3: Vec<&Rect> = d.rects.iter().filter(|r| r.family == "V3" && r.k == Some(1)).collect();
        assert_eq!(v3[0].v_lo, QuadSurd::ratio(2, 7));
        let g = consts::g();
        let g2 = consts::g2();
        assert_eq!(v3[0].v_hi, (&g2 + 2) / (&(&g2 * 3) + 7));
        assert_eq!(v3[1].v_lo, QuadSurd::ratio(5, 17));
        assert_eq!(v3[1].v_hi, (&g + 2) / (&(&g * 3) + 7));
    }

    #[test]
    fn bottom_strip() {
        let d = build_bottom_1_over_r(4).unwrap();
        assert_eq!(d.rects[0].v_hi, QuadSurd::new(5, -1, 2, 21).unwrap());
        assert_eq!(d.rects[1].v_hi, QuadSurd::new(-3, 1, 6, 21).unwrap());
        let d = build_bottom_1_over_r(3).unwrap();
        assert_eq!(d.rects[0].v_hi, QuadSurd::new(2, -1, 1, 3).unwrap());
        assert_eq!(d.rects[1].v_hi, QuadSurd::new(-1, 1, 2, 3).unwrap());
        assert!(build_bottom_1_over_r(2).is_err());
    }

    #[test]
    fn membership() {
        let d = build_domain(&QuadSurd::ratio(4, 5), 1).unwrap();
        assert_eq!(d.contains_exact(&NatExtPoint::seed(QuadSurd::zero())), Membership::Inside);
        let a = QuadSurd::ratio(13, 25);
        let d = build_domain(&a, 40).unwrap();
        let t = &a - &QuadSurd::ratio(1, 1_000_000_000);
        assert_eq!(d.contains_exact(&NatExtPoint::new(t, QuadSurd::ratio(11, 20))), Membership::Inside);
        let t = &consts::g() - &QuadSurd::ratio(1, 1_000_000_000);
        assert_eq!(d.contains_exact(&NatExtPoint::new(t, QuadSurd::ratio(11, 20))), Membership::Outside);
        let d = build_domain(&QuadSurd::ratio(43, 100), 1).unwrap();
        let p = NatExtPoint::new(QuadSurd::ratio(9, 20), QuadSurd::ratio(3, 10));
        assert_eq!(d.contains_exact(&p), Membership::Outside);
        // the open right edge t = alpha
        let p = NatExtPoint::new(QuadSurd::ratio(43, 100), QuadSurd::ratio(1, 10));
        assert_eq!(d.contains_exact(&p), Membership::Boundary);
        assert_eq!(d.contains_f64(0.43 - 1e-12, 0.1, 1e-10), Membership::Boundary);
        assert_eq!(d.contains_f64(0.2, 0.1, 1e-10), Membership::Inside);
        assert_eq!(d.contains_f64(0.2, 0.9, 1e-10), Membership::Outside);
    }

    #[test]
    fn seams_agree() {
        let same = |r1: Regime, r2: Regime, a: &QuadSurd| {
            let x = domain_formula(r1, a, 4).unwrap().region();
            let y = domain_formula(r2, a, 4).unwrap().region();
            assert_eq!(x, y, "{r1} vs {r2} at {a}");
        };
        same(Regime::AboveG, Regime::HalfToG, &consts::g());
        same(Regime::HalfToG, Regime::Half, &half());
        same(Regime::Half, Regime::SilverToHalf, &half());
        same(Regime::SilverToHalf, Regime::Silver, &consts::sqrt2m1());
        same(Regime::Silver, Regime::PellFamilies, &consts::sqrt2m1());
    }

    #[test]
    fn rects_are_interior_disjoint() {
        for a in [QuadSurd::ratio(4, 5), QuadSurd::ratio(13, 25), QuadSurd::ratio(9, 20), QuadSurd::ratio(81, 200)] {
            let d = build_domain(&a, 6).unwrap();
            let live: Vec<&Rect> = d.rects.iter().filter(|r| !r.is_degenerate()).collect();
            for (i, r) in live.iter().enumerate() {
                for q in &live[i + 1..] {
                    let overlap = (&r.t_lo).max(&q.t_lo) < (&r.t_hi).min(&q.t_hi)
                        && (&r.v_lo).max(&q.v_lo) < (&r.v_hi).min(&q.v_hi);
                    assert!(!overlap, "{a}: {} {:?} / {} {:?}", r.family, r.k, q.family, q.k);
                }
            }
        }
    }
}
