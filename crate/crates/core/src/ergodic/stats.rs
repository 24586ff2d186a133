//! Birkhoff averages along orbits: entropy, visit frequencies, the
//! distribution of approximation coefficients, digit counts, and domain
//! closure.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{random_start, SimConfig};
use crate::cf::SignedDigit;
use crate::domain::{
    build_domain, log_argument, normalizer, push_rect, rect_measure, split_by_cylinder, Enclosure, Membership, Rect,
    RectIndex, Region,
};
use crate::error::{Error, Result};
use crate::exact::{consts, QuadSurd};

const BATCHES: usize = 100;

/// Mean with a batch-means standard error (100 batches).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
}

/// Means of consecutive equal batches; a remainder shorter than one batch
/// is dropped.
fn batch_means(xs: impl Iterator<Item = f64>, n: u64) -> Result<BatchEstimate> {
    let size = n / BATCHES as u64;
    if size == 0 {
        return Err(Error::Domain(format!("need at least {BATCHES} samples after burn-in, got {n}")));
    }
    let mut sums = vec![0.0f64; BATCHES];
    let mut used = 0u64;
    for (i, x) in xs.enumerate() {
        let b = i as u64 / size;
        if b >= BATCHES as u64 {
            break;
        }
        sums[b as usize] += x;
        used += 1;
    }
    if used < size * BATCHES as u64 {
        return Err(Error::Domain(format!("orbit ended after {used} usable samples")));
    }
    let means: Vec<f64> = sums.iter().map(|s| s / size as f64).collect();
    let mean = means.iter().sum::<f64>() / BATCHES as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    Ok(BatchEstimate { value: mean, stderr: (var / BATCHES as f64).sqrt(), n: used })
}

fn kept(cfg: &SimConfig) -> u64 {
    cfg.n_iters - cfg.burn_in
}

/// `pi^2 / (6 log(1 + alpha))` on `(g, 1]`, `pi^2 / (6 log G)` on `(g^2, g]`.
pub fn expected_entropy(alpha: &QuadSurd) -> Option<f64> {
    let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
    if *alpha > consts::g() && *alpha <= QuadSurd::one() {
        Some(pi2_6 / alpha.to_f64().ln_1p())
    } else if *alpha > consts::g2() && *alpha <= consts::g() {
        Some(pi2_6 / consts::big_g().to_f64().ln())
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub alpha: f64,
    pub n: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub expected: Option<f64>,
    /// `|estimate - expected| / stderr`.
    pub sigma_distance: Option<f64>,
    pub relative_error: Option<f64>,
}

/// `(1/n) sum 2 log(1/|t_k|)` along a random orbit.
pub fn entropy_estimate(cfg: &SimConfig) -> Result<EntropyReport> {
    cfg.validate()?;
    let xs = random_start(cfg, 0).skip(cfg.burn_in as usize).map(|s| -2.0 * s.t.abs().ln());
    let est = batch_means(xs, kept(cfg))?;
    let expected = expected_entropy(&cfg.alpha);
    Ok(EntropyReport {
        alpha: cfg.alpha.to_f64(),
        n: est.n,
        estimate: est.value,
        stderr: est.stderr,
        expected,
        sigma_distance: expected.map(|e| (est.value - e).abs() / est.stderr),
        relative_error: expected.map(|e| (est.value - e).abs() / e),
    })
}

/// Limiting distribution of `theta_n` for the regular map:
/// `t / log 2` up to `1/2`, `(1 - t + log 2t) / log 2` on `[1/2, 1]`.
pub fn theta_cdf_regular(t: f64) -> f64 {
    let l2 = std::f64::consts::LN_2;
    if t <= 0.0 {
        0.0
    } else if t <= 0.5 {
        t / l2
    } else if t <= 1.0 {
        (1.0 - t + (2.0 * t).ln()) / l2
    } else {
        1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub alpha: f64,
    pub n: u64,
    pub grid: Vec<f64>,
    pub empirical: Vec<f64>,
    /// The closed form, available for `alpha = 1`.
    pub expected: Option<Vec<f64>>,
    pub max_abs_dev: Option<f64>,
}

/// Empirical CDF of `theta_{n-1} = v_n / (1 + t_n v_n)` at the grid points.
pub fn theta_distribution(cfg: &SimConfig, grid: &[f64]) -> Result<ThetaReport> {
    cfg.validate()?;
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut below = vec![0u64; sorted.len() + 1];
    let mut n = 0u64;
    for s in random_start(cfg, 0).skip(cfg.burn_in as usize) {
        // number of grid points g with theta > g, i.e. those whose CDF misses it
        let i = sorted.partition_point(|&g| g < s.theta_prev);
        below[i] += 1;
        n += 1;
    }
    let mut cum = 0u64;
    let mut empirical = Vec::with_capacity(sorted.len());
    for c in &below[..sorted.len()] {
        cum += c;
        empirical.push(cum as f64 / n.max(1) as f64);
    }
    let expected =
        (cfg.alpha == QuadSurd::one()).then(|| sorted.iter().map(|&t| theta_cdf_regular(t)).collect::<Vec<_>>());
    let max_abs_dev =
        expected.as_ref().map(|e| e.iter().zip(&empirical).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    Ok(ThetaReport { alpha: cfg.alpha.to_f64(), n, grid: sorted, empirical, expected, max_abs_dev })
}

/// Whether some `t` in `[alpha - 1, alpha)` has digit `d`.
///
/// Positive digits need `a > 1/alpha - alpha`, negative ones
/// `a > 1/(1 - alpha) - alpha`.
pub fn admissible_digit(d: SignedDigit, alpha: &QuadSurd) -> bool {
    let one = QuadSurd::one();
    let a = QuadSurd::from_int(d.a);
    if d.a == 0 {
        return false;
    }
    if d.eps > 0 {
        a > &alpha.recip().expect("alpha > 0") - alpha
    } else {
        if *alpha == one {
            return false;
        }
        a > &(&one - alpha).recip().expect("alpha < 1") - alpha
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DigitHistogram {
    pub alpha: f64,
    pub n: u64,
    /// `(digit, count)` ordered by signed value.
    pub counts: Vec<(SignedDigit, u64)>,
    /// Digits that occurred although no point of `[alpha - 1, alpha)`
    /// produces them; empty unless the float orbit misbehaves.
    pub excluded_seen: Vec<SignedDigit>,
}

impl DigitHistogram {
    pub fn count(&self, d: SignedDigit) -> u64 {
        self.counts.iter().find(|(e, _)| *e == d).map_or(0, |(_, c)| *c)
    }
}

pub fn digit_histogram(cfg: &SimConfig) -> Result<DigitHistogram> {
    cfg.validate()?;
    let mut m: BTreeMap<i64, u64> = BTreeMap::new();
    let mut n = 0;
    for s in random_start(cfg, 0).skip(cfg.burn_in as usize) {
        *m.entry(s.digit.signed()).or_default() += 1;
        n += 1;
    }
    let counts: Vec<(SignedDigit, u64)> =
        m.into_iter().map(|(k, c)| (SignedDigit::from_signed(k).expect("nonzero"), c)).collect();
    let excluded_seen = counts.iter().map(|(d, _)| *d).filter(|d| !admissible_digit(*d, &cfg.alpha)).collect();
    Ok(DigitHistogram { alpha: cfg.alpha.to_f64(), n, counts, excluded_seen })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub rect: Rect,
    /// Images of the single-digit pieces of `rect`.
    pub image: Vec<Rect>,
    pub measure: Enclosure,
    pub image_measure: Enclosure,
    /// Equality of the exact log arguments, when they share a field.
    pub exact_equal: Option<bool>,
    /// `m(D) / N_alpha`.
    pub mu: f64,
    pub visits: u64,
    pub n: u64,
    pub frequency: f64,
    /// Binomial standard error `sqrt(mu (1 - mu) / n)`.
    pub sigma: f64,
    pub z: f64,
}

/// Measure of each rectangle against that of its image, and its visit
/// frequency along one random orbit against `m(D) / N_alpha`.
pub fn invariance_check_many(cfg: &SimConfig, rects: &[Rect]) -> Result<Vec<InvarianceReport>> {
    cfg.validate()?;
    let dom = build_domain(&cfg.alpha, cfg.domain_k)?;
    let omega = dom.region();
    let norm = normalizer(&cfg.alpha, cfg.domain_k)?.value.mid();
    let mut pre = Vec::new();
    for r in rects {
        if !Region::from_rects(std::slice::from_ref(r)).difference(&omega).is_empty() {
            return Err(Error::Domain(format!("rectangle {:?} is not inside the domain", r.to_f64())));
        }
        let image = split_by_cylinder(r, &cfg.alpha)?
            .iter()
            .map(|p| push_rect(p, &cfg.alpha))
            .collect::<Result<Vec<Rect>>>()?;
        let m = rect_measure(r)?;
        let mut mi = Enclosure::zero();
        let mut prod = Some(QuadSurd::one());
        for p in &image {
            mi = mi.add(&rect_measure(p)?);
            // log arguments multiply when measures add
            prod = prod.zip(log_argument(p)).and_then(|(x, y)| x.checked_mul(&y).ok());
        }
        let exact_equal = log_argument(r).zip(prod).map(|(a, b)| a == b);
        pre.push((r.clone(), image, m, mi, exact_equal, r.to_f64()));
    }
    let mut visits = vec![0u64; rects.len()];
    let mut n = 0u64;
    for s in random_start(cfg, 0).skip(cfg.burn_in as usize) {
        for (c, p) in visits.iter_mut().zip(&pre) {
            let b = p.5;
            if b[0] <= s.t && s.t <= b[1] && b[2] <= s.v && s.v <= b[3] {
                *c += 1;
            }
        }
        n += 1;
    }
    Ok(pre
        .into_iter()
        .zip(visits)
        .map(|((rect, image, measure, image_measure, exact_equal, _), visits)| {
            let mu = measure.mid() / norm;
            let frequency = visits as f64 / n as f64;
            let sigma = (mu * (1.0 - mu) / n as f64).sqrt();
            InvarianceReport {
                rect,
                image,
                measure,
                image_measure,
                exact_equal,
                mu,
                visits,
                n,
                frequency,
                sigma,
                z: (frequency - mu) / sigma,
            }
        })
        .collect())
}

pub fn invariance_check(cfg: &SimConfig, d: &Rect) -> Result<InvarianceReport> {
    Ok(invariance_check_many(cfg, std::slice::from_ref(d))?.remove(0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub alpha: f64,
    pub orbits: u64,
    pub checked: u64,
    pub inside: u64,
    pub boundary: u64,
    pub outside: u64,
    /// First escaping point found, as `(orbit, n, t, v)`.
    pub first_escape: Option<(u64, u64, f64, f64)>,
}

/// Classifies every post-burn-in point of `orbits` random orbits against
/// the domain, with a `tol` shell around its boundary.
pub fn closure_check(cfg: &SimConfig, orbits: u64, tol: f64) -> Result<ClosureReport> {
    cfg.validate()?;
    let dom = build_domain(&cfg.alpha, cfg.domain_k)?;
    let idx = RectIndex::new(&dom);
    let per: Vec<[u64; 3]> = (0..orbits)
        .into_par_iter()
        .map(|k| {
            let mut c = [0u64; 3];
            for s in random_start(cfg, k).skip(cfg.burn_in as usize) {
                c[match idx.classify(s.t, s.v, tol) {
                    Membership::Inside => 0,
                    Membership::Boundary => 1,
                    Membership::Outside => 2,
                }] += 1;
            }
            c
        })
        .collect();
    let first_escape = per.iter().position(|c| c[2] > 0).and_then(|k| {
        random_start(cfg, k as u64)
            .skip(cfg.burn_in as usize)
            .find(|s| idx.classify(s.t, s.v, tol) == Membership::Outside)
            .map(|s| (k as u64, s.n, s.t, s.v))
    });
    let sum = |i: usize| per.iter().map(|c| c[i]).sum::<u64>();
    Ok(ClosureReport {
        alpha: cfg.alpha.to_f64(),
        orbits,
        checked: sum(0) + sum(1) + sum(2),
        inside: sum(0),
        boundary: sum(1),
        outside: sum(2),
        first_escape,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a: QuadSurd, n: u64) -> SimConfig {
        SimConfig::new(a).with_iters(n, 1000).with_seed(11).with_precision(53)
    }

    #[test]
    fn entropy_of_gauss_map() {
        let r = entropy_estimate(&cfg(QuadSurd::one(), 400_000)).unwrap();
        assert!(r.relative_error.unwrap() < 0.01, "{r:?}");
        assert!(r.sigma_distance.unwrap() < 4.0);
    }

    #[test]
    fn theta_cdf_closed_form() {
        assert!((theta_cdf_regular(0.5) - 0.5 / std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(theta_cdf_regular(1.0), 1.0);
        let r = theta_distribution(&cfg(QuadSurd::one(), 200_000), &[0.1, 0.25, 0.5, 0.75, 1.0]).unwrap();
        assert!(r.max_abs_dev.unwrap() < 0.01, "{r:?}");
        assert_eq!(*r.empirical.last().unwrap(), 1.0);
    }

    #[test]
    fn digit_exclusions() {
        let h = digit_histogram(&cfg(QuadSurd::ratio(13, 25), 100_000)).unwrap();
        assert_eq!(h.count(SignedDigit::pos(1)), 0);
        assert!(h.excluded_seen.is_empty());
        let h = digit_histogram(&cfg(QuadSurd::one(), 100_000)).unwrap();
        assert!(h.counts.iter().all(|(d, _)| d.eps > 0));
        // +2 is still emitted at 0.43, above sqrt2 - 1, and never below it
        let a = QuadSurd::ratio(43, 100);
        assert!(admissible_digit(SignedDigit::pos(2), &a));
        assert!(digit_histogram(&cfg(a, 100_000)).unwrap().count(SignedDigit::pos(2)) > 0);
        let h = digit_histogram(&cfg(QuadSurd::ratio(41, 100), 100_000)).unwrap();
        assert_eq!(h.count(SignedDigit::pos(2)), 0);
        assert!(h.excluded_seen.is_empty());
    }

    #[test]
    fn invariance_on_a_probe() {
        let a = QuadSurd::ratio(4, 5);
        let d = Rect::new(
            QuadSurd::ratio(1, 10),
            QuadSurd::ratio(1, 5),
            QuadSurd::ratio(1, 10),
            QuadSurd::ratio(3, 10),
            "[][]",
            "probe",
        );
        // [0.1, 0.2] spans digits 5..10 and is pushed piece by piece
        let r = invariance_check(&cfg(a, 300_000), &d).unwrap();
        assert_eq!(r.image.len(), 6);
        assert_eq!(r.exact_equal, Some(true));
        assert!(r.z.abs() < 4.0, "{r:?}");
    }

    #[test]
    fn orbits_stay_in_domain() {
        for a in [QuadSurd::ratio(4, 5), QuadSurd::ratio(9, 20), QuadSurd::ratio(81, 200)] {
            let r = closure_check(&cfg(a, 20_000), 3, 1e-10).unwrap();
            assert_eq!(r.outside, 0, "{r:?}");
        }
    }
}
