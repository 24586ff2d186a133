//! Building a domain from a neighbouring one by removing a strip `R` above
//! `t = alpha` and adding its rewritten image `A` on the left, stage by stage,
//! together with the forward images of both.

use serde::{Deserialize, Serialize};

use super::{domain_formula, half, one, r12a, r12am1, regime_of, Rect, RectUnion, Regime, Region};
use crate::error::{Error, Result};
use crate::exact::{consts, QuadSurd};
use crate::mobius::Mobius;

/// The strips removed from and added to the domain at one stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiltStage {
    pub removed: RectUnion,
    pub added: RectUnion,
}

enum Scheme {
    /// Start from the domain at `g`; `v`-bands are `Q^k [0, 1/2)`.
    Golden,
    /// Start from the domain at `sqrt2 - 1`; `v`-bands are `P^k J`.
    Silver,
}

fn scheme(alpha: &QuadSurd) -> Result<Scheme> {
    let r = regime_of(alpha)?;
    if *alpha <= consts::g() && *alpha >= half() {
        Ok(Scheme::Golden)
    } else if matches!(r, Regime::Silver | Regime::PellFamilies | Regime::PellEnd) {
        Ok(Scheme::Silver)
    } else {
        Err(Error::UnsupportedAlpha(format!(
            "staged construction covers [1/2, g] and [(sqrt10-2)/3, sqrt2-1]; alpha = {alpha}"
        )))
    }
}

fn bands(out: &mut Vec<Rect>, t: (QuadSurd, QuadSurd), m: &Mobius, js: &[(QuadSurd, QuadSurd)], name: &str, k: usize) {
    for (j0, j1) in js {
        out.push(Rect::band(t.0.clone(), t.1.clone(), m, (j0, j1), "[)[)", name).with_k(k));
    }
}

fn union(alpha: &QuadSurd, rects: Vec<Rect>) -> Result<RectUnion> {
    Ok(RectUnion { alpha: alpha.clone(), regime: regime_of(alpha)?, truncation_depth: 0, rects, tail_hulls: vec![] })
}

/// Stage `k`: removed `R_k` with its forward images, added `A_k` with its
/// forward images.
pub fn quilt_stage(alpha: &QuadSurd, k: usize) -> Result<QuiltStage> {
    let a = alpha;
    let kk = u32::try_from(k).map_err(|_| Error::Domain("stage index too large".into()))?;
    let (mut removed, mut added) = (Vec::new(), Vec::new());
    match scheme(a)? {
        Scheme::Golden => {
            let g = consts::g();
            let g2 = consts::g2();
            let qk = Mobius::new(1, 1, 1, 2).pow(kk);
            let js = [(QuadSurd::zero(), half())];
            bands(&mut removed, (a.clone(), g.clone()), &qk, &js, "R", k);
            bands(&mut removed, (-&g2, r12a(a)), &Mobius::new(0, 1, 1, 2).compose(&qk), &js, "TR", k);
            bands(&mut added, (a - &one(), -&g2), &Mobius::new(1, 0, 1, 1).compose(&qk), &js, "A", k);
            bands(&mut added, (r12am1(a), g), &Mobius::new(1, 1, 1, 2).compose(&qk), &js, "TA", k);
        }
        Scheme::Silver => {
            let s = consts::sqrt2m1();
            let h = QuadSurd::new(-2, 1, 2, 2)?;
            let two = QuadSurd::from_int(2);
            let p = Mobius::new(1, 2, 2, 5);
            let pk = p.pow(kk);
            let js = [(QuadSurd::zero(), consts::g2()), (half(), consts::g())];
            bands(&mut removed, (a.clone(), s.clone()), &pk, &js, "R", k);
            bands(
                &mut removed,
                (&s - &one(), (one() - a * 3) / a),
                &Mobius::new(0, 1, 1, 3).compose(&pk),
                &js,
                "TR",
                k,
            );
            bands(
                &mut removed,
                (h.clone(), (&two - &(a * 5)) / (a * 3 - 1)),
                &Mobius::new(1, 3, 2, 5).compose(&pk),
                &js,
                "T2R",
                k,
            );
            bands(&mut added, (a - &one(), &s - &one()), &Mobius::new(1, 0, 1, 1).compose(&pk), &js, "A", k);
            bands(&mut added, (r12am1(a), h), &Mobius::new(1, 1, 1, 2).compose(&pk), &js, "TA", k);
            bands(&mut added, ((&two - &(a * 5)) / (a * 2 - 1), s), &p.compose(&pk), &js, "T2A", k);
        }
    }
    removed.retain(|r| !r.is_degenerate());
    added.retain(|r| !r.is_degenerate());
    Ok(QuiltStage { removed: union(a, removed)?, added: union(a, added)? })
}

/// `Omega_{alpha,k}`: the starting domain with stages `0..k` applied and the
/// strip `R_k`, not yet moved, cut off.
pub fn quilt_domain(alpha: &QuadSurd, k: usize) -> Result<Region> {
    let base = match scheme(alpha)? {
        Scheme::Golden => domain_formula(Regime::HalfToG, &consts::g(), 0)?,
        Scheme::Silver => domain_formula(Regime::Silver, &consts::sqrt2m1(), 0)?,
    };
    let mut cur = base.region();
    let mut gone = Region::empty();
    for j in 0..k {
        let st = quilt_stage(alpha, j)?;
        cur = cur.union(&st.added.region());
        gone = gone.union(&st.removed.region());
    }
    let rk = quilt_stage(alpha, k)?.removed;
    let rk: Vec<Rect> = rk.rects.into_iter().filter(|r| r.family == "R").collect();
    Ok(cur.difference(&gone).difference(&Region::from_rects(&rk)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_domain;

    #[test]
    fn stage_measures_balance() {
        for a in [QuadSurd::ratio(13, 25), QuadSurd::ratio(81, 200)] {
            for k in 0..4 {
                let st = quilt_stage(&a, k).unwrap();
                let r = st.removed.region().measure().unwrap();
                let d = st.added.region().measure().unwrap();
                assert!((r.mid() - d.mid()).abs() < 1e-15, "{a} k={k}");
                assert!(r.mid() > 0.0);
            }
        }
        assert!(matches!(quilt_stage(&QuadSurd::ratio(9, 20), 0), Err(Error::UnsupportedAlpha(_))));
    }

    #[test]
    fn anchor_bands() {
        let st = quilt_stage(&QuadSurd::ratio(2, 5), 1).unwrap();
        let a: Vec<&Rect> = st.added.rects.iter().filter(|r| r.family == "A").collect();
        assert_eq!(a[0].v_lo, QuadSurd::ratio(2, 7));
        assert_eq!(a[1].v_lo, QuadSurd::ratio(5, 17));
    }

    #[test]
    fn converges_to_closed_form() {
        let a = QuadSurd::ratio(13, 25);
        let target = build_domain(&a, 0).unwrap().region();
        let mut last = f64::INFINITY;
        for k in [1, 3, 6] {
            let m = quilt_domain(&a, k).unwrap().symmetric_difference(&target).measure().unwrap().hi;
            assert!(m < last, "k={k}: {m}");
            last = m;
        }
        assert!(last < 1e-4);
        let a = QuadSurd::ratio(81, 200);
        let target = build_domain(&a, 12).unwrap().region();
        let m = |k| quilt_domain(&a, k).unwrap().symmetric_difference(&target).measure().unwrap().hi;
        let (m1, m3) = (m(1), m(3));
        assert!(m3 < m1 && m3 < 1e-6, "{m1} {m3}");
    }
}
