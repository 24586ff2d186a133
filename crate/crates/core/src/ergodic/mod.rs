//! Orbits of the natural extension and the statistics gathered along them.

mod real;
mod stats;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

pub use real::Real;
pub use stats::{
    admissible_digit, closure_check, digit_histogram, entropy_estimate, expected_entropy, invariance_check,
    invariance_check_many, theta_cdf_regular, theta_distribution, BatchEstimate, ClosureReport, DigitHistogram,
    EntropyReport, InvarianceReport, ThetaReport,
};

use crate::cf::{nat_ext_step, NatExtPoint, SignedDigit};
use crate::error::{Error, Result};
use crate::exact::QuadSurd;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub alpha: QuadSurd,
    /// Total steps, including burn-in.
    pub n_iters: u64,
    /// Leading steps left out of every statistic.
    pub burn_in: u64,
    pub seed: u64,
    /// Up to 53 selects `f64`; more selects double-double (106 bits).
    pub precision_bits: u32,
    /// Truncation depth for the domain used by membership checks.
    pub domain_k: usize,
}

impl SimConfig {
    pub fn new(alpha: QuadSurd) -> Self {
        SimConfig { alpha, n_iters: 1_000_000, burn_in: 1_000, seed: 0, precision_bits: 128, domain_k: 32 }
    }

    pub fn with_iters(mut self, n_iters: u64, burn_in: u64) -> Self {
        self.n_iters = n_iters;
        self.burn_in = burn_in;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.signum() <= 0 || self.alpha > QuadSurd::one() {
            return Err(Error::Domain(format!("alpha = {} is outside (0, 1]", self.alpha)));
        }
        if self.burn_in >= self.n_iters {
            return Err(Error::Domain("burn_in must be smaller than n_iters".into()));
        }
        Ok(())
    }

    fn double_double(&self) -> bool {
        self.precision_bits > 53
    }
}

/// Point `n` of an orbit: `(t_n, v_n)`, the digit `(eps_n, a_n)` consumed
/// to reach it, and `theta_{n-1} = v_n / (1 + t_n v_n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    pub n: u64,
    pub t: f64,
    pub v: f64,
    pub digit: SignedDigit,
    pub theta_prev: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitMode {
    Exact,
    Float,
}

struct FloatOrbit<R: Real> {
    t: R,
    v: R,
    alpha: R,
    n: u64,
    limit: u64,
}

impl<R: Real> Iterator for FloatOrbit<R> {
    type Item = OrbitSample;

    fn next(&mut self) -> Option<OrbitSample> {
        if self.n >= self.limit || self.t.is_zero() {
            return None;
        }
        let one = R::from_f64(1.0);
        let neg = self.t < R::from_f64(0.0);
        let inv = one / self.t.abs();
        let a = (inv + one - self.alpha).floor();
        self.t = inv - a;
        self.v = one / if neg { a - self.v } else { a + self.v };
        self.n += 1;
        let (t, v) = (self.t.to_f64(), self.v.to_f64());
        let af = a.to_f64();
        let digit =
            SignedDigit::new(if neg { -1 } else { 1 }, if af >= u64::MAX as f64 { u64::MAX } else { af as u64 });
        Some(OrbitSample { n: self.n, t, v, digit, theta_prev: v / (1.0 + t * v) })
    }
}

/// A stream of orbit samples, `n = 1, 2, ...`, ending early if `t` hits 0.
pub struct OrbitStream {
    pub mode: OrbitMode,
    inner: Box<dyn Iterator<Item = OrbitSample> + Send>,
}

impl Iterator for OrbitStream {
    type Item = OrbitSample;

    fn next(&mut self) -> Option<OrbitSample> {
        self.inner.next()
    }
}

fn float_stream<R: Real>(x0: R, cfg: &SimConfig) -> OrbitStream {
    let inner = FloatOrbit { t: x0, v: R::from_f64(0.0), alpha: R::from_surd(&cfg.alpha), n: 0, limit: cfg.n_iters };
    OrbitStream { mode: OrbitMode::Float, inner: Box::new(inner) }
}

fn check_start(x0: f64, alpha: f64) -> Result<()> {
    if !(alpha - 1.0 <= x0 && x0 <= alpha) {
        return Err(Error::Domain(format!("x0 = {x0} is outside [alpha-1, alpha]")));
    }
    Ok(())
}

/// Orbit of `(x0, 0)`. Exact when `x0` and `alpha` share a quadratic field,
/// floating point otherwise; a rational `x0` reaches `t = 0` and stops.
pub fn orbit(x0: &QuadSurd, cfg: &SimConfig) -> Result<OrbitStream> {
    cfg.validate()?;
    crate::cf::check_interval(x0, &cfg.alpha)?;
    if x0.compatible(&cfg.alpha) {
        let alpha = cfg.alpha.clone();
        let mut pt = NatExtPoint::seed(x0.clone());
        let mut n = 0u64;
        let limit = cfg.n_iters;
        let inner = std::iter::from_fn(move || {
            if n >= limit || pt.t.is_zero() {
                return None;
            }
            let d = crate::cf::digit(&pt.t, &alpha).ok()?;
            pt = nat_ext_step(&pt, &alpha).ok()?;
            n += 1;
            let (t, v) = (pt.t.to_f64(), pt.v.to_f64());
            Some(OrbitSample { n, t, v, digit: d, theta_prev: pt.theta_prev().to_f64() })
        });
        return Ok(OrbitStream { mode: OrbitMode::Exact, inner: Box::new(inner) });
    }
    Ok(if cfg.double_double() { float_stream(TwoFloat::from_surd(x0), cfg) } else { float_stream(x0.to_f64(), cfg) })
}

/// Float orbit from an `f64` start.
pub fn orbit_f64(x0: f64, cfg: &SimConfig) -> Result<OrbitStream> {
    cfg.validate()?;
    check_start(x0, cfg.alpha.to_f64())?;
    Ok(if cfg.double_double() { float_stream(TwoFloat::from(x0), cfg) } else { float_stream(x0, cfg) })
}

/// Exact orbit points `(t_n, v_n)` for `n = 0..=steps`, stopping at `t = 0`.
pub fn exact_orbit(x0: &QuadSurd, alpha: &QuadSurd, steps: usize) -> Result<Vec<NatExtPoint>> {
    let mut pt = NatExtPoint::seed(x0.clone());
    crate::cf::check_interval(x0, alpha)?;
    let mut out = vec![pt.clone()];
    while out.len() <= steps && !pt.t.is_zero() {
        pt = nat_ext_step(&pt, alpha)?;
        out.push(pt.clone());
    }
    Ok(out)
}

/// Start of orbit number `stream` for `cfg.seed`: uniform on
/// `[alpha - 1, alpha)`, redrawn within `1e-12` of zero.
pub fn random_start(cfg: &SimConfig, stream: u64) -> OrbitStream {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let lo = cfg.alpha.to_f64() - 1.0;
    loop {
        let u: f64 = rng.random();
        let fine: f64 = rng.random();
        let x = lo + u;
        if x.abs() < 1e-12 {
            continue;
        }
        return if cfg.double_double() {
            let lo_dd = TwoFloat::from_surd(&(&cfg.alpha - &QuadSurd::one()));
            float_stream(lo_dd + TwoFloat::new_add(u, fine * f64::EPSILON), cfg)
        } else {
            float_stream(x, cfg)
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{convergents, expand};

    #[test]
    fn rational_orbit_terminates() {
        let cfg = SimConfig::new(QuadSurd::one()).with_iters(100, 0);
        let s: Vec<OrbitSample> = orbit(&QuadSurd::ratio(5, 17), &cfg).unwrap().collect();
        assert_eq!(s.len(), 3);
        assert_eq!(s.last().unwrap().t, 0.0);
    }

    #[test]
    fn worked_example_becomes_two_periodic() {
        let x = QuadSurd::new(-3, 1, 4, 17).unwrap();
        let a = QuadSurd::ratio(9, 20);
        let pts = exact_orbit(&x, &a, 12).unwrap();
        for n in 1..10 {
            assert_eq!(pts[n].t, pts[n + 2].t);
        }
        assert!((pts[10].v.to_f64() - pts[12].v.to_f64()).abs() < 1e-8);
        // pasts are q_{n-1}/q_n
        let cs = convergents(&expand(&x, &a, 20).unwrap(), 12).unwrap();
        assert_eq!(pts[4].v, QuadSurd::new(cs[4].q.clone(), 0, cs[5].q.clone(), 0).unwrap());
    }

    #[test]
    fn float_tracks_exact() {
        let x = QuadSurd::new(-3, 1, 4, 17).unwrap();
        let a = QuadSurd::ratio(9, 20);
        let cfg = SimConfig::new(a.clone()).with_iters(30, 0);
        let exact: Vec<OrbitSample> = orbit(&x, &cfg).unwrap().collect();
        let dd: Vec<OrbitSample> = orbit_f64(x.to_f64(), &cfg).unwrap().collect();
        for (e, f) in exact.iter().zip(&dd).take(10) {
            assert_eq!(e.digit, f.digit);
            assert!((e.v - f.v).abs() < 1e-12);
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let cfg = SimConfig::new(QuadSurd::ratio(13, 25)).with_iters(1000, 10).with_seed(7);
        let a: Vec<OrbitSample> = random_start(&cfg, 3).collect();
        let b: Vec<OrbitSample> = random_start(&cfg, 3).collect();
        assert_eq!(a, b);
        let c: Vec<OrbitSample> = random_start(&cfg, 4).collect();
        assert_ne!(a, c);
        for s in &a {
            assert!((s.theta_prev * (1.0 + s.t * s.v) - s.v).abs() < 1e-15);
        }
    }
}
