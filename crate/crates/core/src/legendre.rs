//! Legendre constants `L(alpha)`: the largest `c` such that
//! `q^2 |x - p/q| < c` forces `p/q` to be an alpha-convergent of `x`.
//!
//! Closed forms cover `[g^2, 1]` and the points `1/r`; below `g^2` only
//! brackets are known. [`empirical_legendre`] checks the closed forms by
//! scanning every fraction up to a denominator bound.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::{convergents, expand, theta};
use crate::error::{Error, Result};
use crate::exact::{consts, QuadSurd, Rational, Tower};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegendreFormula {
    /// `alpha / (alpha + 1)`
    AlphaOverAlphaPlusOne,
    /// `1 - alpha`
    OneMinusAlpha,
    /// `alpha / (1 + g alpha)`
    AlphaOverOnePlusGAlpha,
    /// `(r + 1 - sqrt((r+1)^2 - 4)) / 2` at `alpha = 1/r`
    Reciprocal,
}

impl LegendreFormula {
    pub fn eval(self, alpha: &QuadSurd) -> Result<Tower> {
        let a = Tower::pure(alpha.clone());
        let one = Tower::pure(QuadSurd::one());
        match self {
            LegendreFormula::AlphaOverAlphaPlusOne => a.div(&a.add(&one)?),
            LegendreFormula::OneMinusAlpha => one.sub(&a),
            LegendreFormula::AlphaOverOnePlusGAlpha => {
                let ga = Tower::pure(consts::g()).mul(&a)?;
                a.div(&one.add(&ga)?)
            }
            LegendreFormula::Reciprocal => {
                let r =
                    reciprocal_index(alpha).ok_or_else(|| Error::UnsupportedAlpha(format!("{alpha} is not 1/r")))?;
                Ok(Tower::pure(l_reciprocal(r)))
            }
        }
    }
}

/// One piece of the closed form. The interval is `(lo, hi]`, or `[lo, hi]`
/// when `lo_closed`; the `1/r` pieces are single points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendrePiece {
    #[serde(serialize_with = "ser_tower", deserialize_with = "de_tower")]
    pub lo: Tower,
    #[serde(serialize_with = "ser_tower", deserialize_with = "de_tower")]
    pub hi: Tower,
    pub lo_closed: bool,
    pub formula: LegendreFormula,
}

fn ser_tower<S: serde::Serializer>(t: &Tower, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::exact::render_tower(t, 20))
}

fn de_tower<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Tower, D::Error> {
    let s = <String as Deserialize>::deserialize(d)?;
    crate::exact::parse_tower(&s).map_err(serde::de::Error::custom)
}

/// The pieces in decreasing order of alpha, with the points `1/r` for
/// `r = 3..=r_max`.
pub fn legendre_pieces(r_max: u64) -> Vec<LegendrePiece> {
    let t = |x: QuadSurd| Tower::pure(x);
    let mut out = vec![
        LegendrePiece {
            lo: t(consts::g()),
            hi: t(QuadSurd::one()),
            lo_closed: false,
            formula: LegendreFormula::AlphaOverAlphaPlusOne,
        },
        LegendrePiece {
            lo: consts::gtilde(),
            hi: t(consts::g()),
            lo_closed: false,
            formula: LegendreFormula::OneMinusAlpha,
        },
        LegendrePiece {
            lo: t(consts::g2()),
            hi: consts::gtilde(),
            lo_closed: true,
            formula: LegendreFormula::AlphaOverOnePlusGAlpha,
        },
    ];
    for r in 3..=r_max {
        let p = t(QuadSurd::ratio(1, r as i64));
        out.push(LegendrePiece { lo: p.clone(), hi: p, lo_closed: true, formula: LegendreFormula::Reciprocal });
    }
    out
}

/// `L(1/r) = (r + 1 - sqrt((r+1)^2 - 4)) / 2`.
pub fn l_reciprocal(r: u64) -> QuadSurd {
    let s = r as i64 + 1;
    QuadSurd::new(s, -1, 2, (s * s - 4) as u64).expect("nonzero denominator")
}

/// `r` when `alpha = 1/r` with `r >= 2`.
fn reciprocal_index(alpha: &QuadSurd) -> Option<u64> {
    let q = alpha.to_rational()?;
    (q.numer().is_one() && q.denom() > &BigInt::from(1)).then(|| q.denom().to_u64()).flatten()
}

/// Exact comparison of `alpha` with `g~`, the positive root of
/// `g x^2 + (2 - g) x - 1`.
///
/// Inside `Q(sqrt 5)` the tower arithmetic decides it directly. Otherwise a
/// rational bracket of `g~` is halved until it excludes `alpha`; `g~` has
/// degree four, so it never equals a quadratic surd and the loop ends.
pub fn compare_gtilde(alpha: &QuadSurd) -> Result<Ordering> {
    if alpha.compatible(&consts::g()) {
        return Tower::pure(alpha.clone()).compare(&consts::gtilde());
    }
    let poly = |x: &Rational| {
        let x = QuadSurd::from_rational(x);
        let g = consts::g();
        (&(&g * &(&x * &x)) + &(&(&(QuadSurd::from_int(2) - &g) * &x) - &QuadSurd::one())).signum()
    };
    let mut lo = Rational::new(57.into(), 100.into());
    let mut hi = Rational::new(58.into(), 100.into());
    for _ in 0..crate::exact::MAX_PRECISION_BITS {
        let (ql, qh) = (QuadSurd::from_rational(&lo), QuadSurd::from_rational(&hi));
        if *alpha < ql {
            return Ok(Ordering::Less);
        }
        if *alpha > qh {
            return Ok(Ordering::Greater);
        }
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        if poly(&mid) < 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::PrecisionExhausted { bits: crate::exact::MAX_PRECISION_BITS })
}

/// The piece covering `alpha`, or `UnsupportedAlpha` outside
/// `[g^2, 1] ∪ {1/r : r >= 3}`.
pub fn legendre_piece(alpha: &QuadSurd) -> Result<LegendreFormula> {
    if alpha.signum() <= 0 || *alpha > QuadSurd::one() {
        return Err(Error::Domain(format!("alpha = {alpha} is outside (0, 1]")));
    }
    if *alpha > consts::g() {
        return Ok(LegendreFormula::AlphaOverAlphaPlusOne);
    }
    if compare_gtilde(alpha)? == Ordering::Greater {
        return Ok(LegendreFormula::OneMinusAlpha);
    }
    if *alpha >= consts::g2() {
        return Ok(LegendreFormula::AlphaOverOnePlusGAlpha);
    }
    match reciprocal_index(alpha) {
        Some(_) => Ok(LegendreFormula::Reciprocal),
        None => {
            Err(Error::UnsupportedAlpha(format!("no closed form for alpha = {alpha} below g^2; see legendre_bounds")))
        }
    }
}

pub fn legendre_constant(alpha: &QuadSurd) -> Result<Tower> {
    legendre_piece(alpha)?.eval(alpha)
}

/// What is known about `L(alpha)` below `1/3`.
#[derive(Clone, Debug, PartialEq)]
pub enum LegendreBounds {
    /// `alpha = 1/r`, where the value is known.
    Exact(Tower),
    /// `1/(r+1) < alpha < 1/r`: the proved bracket `(1/(r+2), 1/r)` and the
    /// conjectured sharper one `(1/(r+2), 1/(r + 1 - L(1/r)))`.
    Bracket { r: u64, proved: (QuadSurd, QuadSurd), conjectured: (QuadSurd, QuadSurd) },
}

pub fn legendre_bounds(alpha: &QuadSurd) -> Result<LegendreBounds> {
    if alpha.signum() <= 0 || *alpha > QuadSurd::ratio(1, 3) {
        return Err(Error::Domain(format!("bounds are for 0 < alpha <= 1/3, got {alpha}")));
    }
    if reciprocal_index(alpha).is_some() {
        return legendre_constant(alpha).map(LegendreBounds::Exact);
    }
    let r = alpha.recip()?.floor().to_u64().ok_or_else(|| Error::Domain("alpha too small".into()))?;
    let lo = QuadSurd::ratio(1, r as i64 + 2);
    let upper = (QuadSurd::from_int(r as i64 + 1) - l_reciprocal(r)).recip()?;
    Ok(LegendreBounds::Bracket { r, proved: (lo.clone(), QuadSurd::ratio(1, r as i64)), conjectured: (lo, upper) })
}

/// A non-convergent fraction and its approximation coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub p: BigInt,
    pub q: BigInt,
    pub x: QuadSurd,
    pub theta: QuadSurd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalLegendre {
    pub alpha: QuadSurd,
    pub q_max: u64,
    pub n_x: usize,
    pub seed: u64,
    /// Smallest `theta` over all reduced non-convergents with `q <= q_max`.
    pub min_theta: f64,
    pub witness: Option<Witness>,
    /// `theta` of every non-convergent below 1, sorted.
    #[serde(skip)]
    pub near: Vec<f64>,
}

impl EmpiricalLegendre {
    /// Non-convergents with `theta < c`.
    pub fn violations(&self, c: f64) -> usize {
        self.near.partition_point(|&t| t < c)
    }
}

/// Random quadratic `x = (P + sqrt D)/R` in `[alpha - 1, alpha)`.
fn random_surd(rng: &mut ChaCha8Rng, alpha: &QuadSurd) -> QuadSurd {
    let lo = alpha - &QuadSurd::one();
    loop {
        let d: u64 = rng.random_range(2..=500);
        if d.sqrt() * d.sqrt() == d {
            continue;
        }
        let r: i64 = rng.random_range(1..=40);
        let sd = (d as f64).sqrt();
        let base = (r as f64 * lo.to_f64() - sd).ceil() as i64;
        let p = base + rng.random_range(0..r);
        let x = QuadSurd::new(p, 1, r, d).expect("r >= 1");
        if x >= lo && x < *alpha && !x.is_zero() {
            return x;
        }
    }
}

struct Scan {
    best: Option<Witness>,
    near: Vec<f64>,
}

fn better(a: &Witness, b: &Witness) -> bool {
    (&a.theta, &a.q, &a.p).cmp(&(&b.theta, &b.q, &b.p)) == Ordering::Less
}

/// Every reduced `p/q` with `q <= q_max` and `theta < 1` that is not a
/// convergent of `x`.
fn scan(x: &QuadSurd, alpha: &QuadSurd, q_max: u64) -> Result<Scan> {
    let e = expand(x, alpha, 100_000)?;
    // Negative digits have a >= 2, so once q_n >= q_{n-1} the denominators
    // never fall again; stop when that happens past q_max.
    let mut n = 16;
    let cs = loop {
        let cs = convergents(&e, n)?;
        let k = cs.len();
        let (prev, last) = (&cs[k - 2].q, &cs[k - 1].q);
        if last > &BigInt::from(q_max) && last >= prev || e.available().is_some_and(|a| a <= n) {
            break cs;
        }
        n *= 2;
    };
    let conv: HashSet<(BigInt, BigInt)> = cs.iter().skip(1).map(|c| c.reduced()).collect();
    let xf = x.to_f64();
    let mut out = Scan { best: None, near: Vec::new() };
    for q in 1..=q_max {
        let f = (q as f64 * xf).floor() as i64;
        for p in f - 1..=f + 1 {
            if p.gcd(&(q as i64)) != 1 {
                continue;
            }
            let tf = q as f64 * (q as f64 * xf - p as f64).abs();
            if tf >= 1.0 {
                continue;
            }
            let (pb, qb) = (BigInt::from(p), BigInt::from(q));
            if conv.contains(&(pb.clone(), qb.clone())) {
                continue;
            }
            let th = theta(x, &pb, &qb)?;
            out.near.push(th.to_f64());
            let w = Witness { p: pb, q: qb, x: x.clone(), theta: th };
            if out.best.as_ref().is_none_or(|b| better(&w, b)) {
                out.best = Some(w);
            }
        }
    }
    Ok(out)
}

/// Scans `n_x` random quadratic `x` (stream `i` of the seeded generator
/// for the `i`-th) against every fraction with denominator up to `q_max`.
pub fn empirical_legendre(alpha: &QuadSurd, q_max: u64, n_x: usize, seed: u64) -> Result<EmpiricalLegendre> {
    if q_max < 10 || n_x == 0 {
        return Err(Error::Domain("need q_max >= 10 and n_x >= 1".into()));
    }
    crate::cf::check_interval(&QuadSurd::zero(), alpha)?;
    let scans: Vec<Scan> = (0..n_x as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let x = random_surd(&mut rng, alpha);
            scan(&x, alpha, q_max)
        })
        .collect::<Result<_>>()?;
    let mut best: Option<Witness> = None;
    let mut near = Vec::new();
    for s in scans {
        near.extend(s.near);
        if let Some(w) = s.best {
            if best.as_ref().is_none_or(|b| better(&w, b)) {
                best = Some(w);
            }
        }
    }
    near.sort_by(f64::total_cmp);
    Ok(EmpiricalLegendre {
        alpha: alpha.clone(),
        q_max,
        n_x,
        seed,
        min_theta: best.as_ref().map_or(f64::INFINITY, |w| w.theta.to_f64()),
        witness: best,
        near,
    })
}

/// The two candidate vertices `M = ((1 - 3 alpha)/alpha, 1/(3 + g))` and
/// `N = (alpha, g^2)` and `theta_{n-1} = v/(1 + t v)` at each.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexReport {
    pub m: (Tower, Tower),
    pub n: (Tower, Tower),
    pub theta_m: Tower,
    pub theta_n: Tower,
    pub min: Tower,
}

pub fn vertex_analysis(alpha: &QuadSurd) -> Result<VertexReport> {
    if *alpha < consts::g2() || *alpha >= consts::sqrt2m1() {
        return Err(Error::Domain(format!("vertex analysis needs g^2 <= alpha < sqrt2 - 1, got {alpha}")));
    }
    let a = Tower::pure(alpha.clone());
    let one = Tower::pure(QuadSurd::one());
    let th = |t: &Tower, v: &Tower| -> Result<Tower> { v.div(&one.add(&t.mul(v)?)?) };
    let mt = one.sub(&Tower::pure(alpha * 3))?.div(&a)?;
    let mv = Tower::pure((consts::g() + 3).recip()?);
    let (nt, nv) = (a.clone(), Tower::pure(consts::g2()));
    let theta_m = th(&mt, &mv)?;
    let theta_n = th(&nt, &nv)?;
    let min = if theta_m.compare(&theta_n)? == Ordering::Greater { theta_n.clone() } else { theta_m.clone() };
    Ok(VertexReport { m: (mt, mv), n: (nt, nv), theta_m, theta_n, min })
}
