//! The alpha-continued-fraction map `T(x) = eps/x - a`, digit streams,
//! convergents and approximation coefficients.

mod expansion;
mod natext;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use expansion::{digits_from_str, Expansion, SignedDigit};
pub use natext::{nat_ext_inverse, nat_ext_step, NatExtPoint};

use crate::error::{Error, Result};
use crate::exact::QuadSurd;
use crate::mobius::Mobius;

/// Checks `x` lies in `[alpha - 1, alpha]`.
pub(crate) fn check_interval(x: &QuadSurd, alpha: &QuadSurd) -> Result<()> {
    if alpha.signum() < 0 || *alpha > QuadSurd::one() {
        return Err(Error::Domain(format!("alpha = {alpha} is outside [0, 1]")));
    }
    let lo = alpha - &QuadSurd::one();
    if x < &lo || x > alpha {
        return Err(Error::Domain(format!("x = {x} is outside [alpha-1, alpha] for alpha = {alpha}")));
    }
    Ok(())
}

/// `(sign x, floor(|1/x| + 1 - alpha))`, decided exactly even when `x` and
/// `alpha` live in different quadratic fields.
pub fn digit(x: &QuadSurd, alpha: &QuadSurd) -> Result<SignedDigit> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    check_interval(x, alpha)?;
    Ok(digit_unchecked(x, alpha))
}

pub(crate) fn digit_unchecked(x: &QuadSurd, alpha: &QuadSurd) -> SignedDigit {
    let eps = x.signum();
    let inv = x.recip().expect("nonzero").abs();
    let a = inv.floor_sum(&(QuadSurd::one() - alpha));
    let a = a.to_u64().expect("partial quotient fits in u64");
    SignedDigit::new(eps, a)
}

/// One step of the map; the result lies in `[alpha - 1, alpha)`.
pub fn step(x: &QuadSurd, alpha: &QuadSurd) -> Result<QuadSurd> {
    let d = digit(x, alpha)?;
    Ok(apply_digit(x, d))
}

fn apply_digit(x: &QuadSurd, d: SignedDigit) -> QuadSurd {
    x.recip().expect("nonzero").abs() - QuadSurd::from_int(d.a)
}

/// Expands `x` under the map for `alpha`.
///
/// States are compared exactly, so a quadratic `x` comes back with its
/// minimal preperiod and period; rationals terminate. If `max_digits` digits
/// are emitted without either, the result is flagged `truncated`.
pub fn expand(x: &QuadSurd, alpha: &QuadSurd, max_digits: usize) -> Result<Expansion> {
    check_interval(x, alpha)?;
    let mut seen: HashMap<QuadSurd, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut t = x.clone();
    loop {
        if t.is_zero() {
            return Ok(Expansion::finite(digits));
        }
        if !t.is_rational() {
            if let Some(&i) = seen.get(&t) {
                let period = digits.split_off(i);
                return Expansion::periodic(digits, period);
            }
            seen.insert(t.clone(), digits.len());
        }
        if digits.len() >= max_digits {
            return Ok(Expansion { truncated: true, ..Expansion::finite(digits) });
        }
        let d = digit_unchecked(&t, alpha);
        t = apply_digit(&t, d);
        digits.push(d);
    }
}

/// Iterator over the digits and futures `t_n` of the orbit of `x`.
pub struct Orbit {
    t: QuadSurd,
    alpha: QuadSurd,
}

impl Orbit {
    pub fn new(x: &QuadSurd, alpha: &QuadSurd) -> Result<Self> {
        check_interval(x, alpha)?;
        Ok(Orbit { t: x.clone(), alpha: alpha.clone() })
    }
}

impl Iterator for Orbit {
    /// `(digit n, t_n)` for n = 1, 2, ...
    type Item = (SignedDigit, QuadSurd);
    fn next(&mut self) -> Option<Self::Item> {
        if self.t.is_zero() {
            return None;
        }
        let d = digit_unchecked(&self.t, &self.alpha);
        self.t = apply_digit(&self.t, d);
        Some((d, self.t.clone()))
    }
}

/// Value of the first `n_terms` digits as an exact rational.
///
/// Terminating expansions stop at their last digit.
pub fn evaluate(e: &Expansion, n_terms: usize) -> Result<QuadSurd> {
    if n_terms == 0 && !e.is_terminating() {
        return Err(Error::Domain("need at least one term of an unterminated expansion".into()));
    }
    let n = match e.available() {
        Some(k) => n_terms.min(k),
        None => n_terms,
    };
    let cs = convergents(e, n)?;
    let last = cs.last().expect("seed pair");
    if last.q.is_zero() {
        return Err(Error::DivergentTail { terms: n });
    }
    QuadSurd::new(last.p.clone(), 0, last.q.clone(), 0)
}

/// Exact value: every digit of a terminating expansion, or the attracting
/// fixed point of the period map for a periodic one.
pub fn evaluate_exact(e: &Expansion) -> Result<QuadSurd> {
    if e.truncated {
        return Err(Error::NotApplicable("a truncated expansion has no exact value".into()));
    }
    let Some(per) = &e.period else {
        return evaluate(e, e.preperiod.len());
    };
    let m = per.iter().fold(Mobius::identity(), |m, d| m.compose(&d.matrix()));
    let tail = m.attracting_fixed_point()?;
    e.prefix_matrix(e.preperiod.len()).apply(&tail).finite().ok_or(Error::DivergentTail { terms: e.preperiod.len() })
}

/// Numerator and denominator of a convergent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConvergentPair {
    pub p: BigInt,
    pub q: BigInt,
}

impl ConvergentPair {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        ConvergentPair { p: p.into(), q: q.into() }
    }

    /// Sign-normalised reduced fraction, `q >= 0`.
    pub fn reduced(&self) -> (BigInt, BigInt) {
        let g = self.p.gcd(&self.q);
        let (mut p, mut q) = if g.is_zero() { (self.p.clone(), self.q.clone()) } else { (&self.p / &g, &self.q / &g) };
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        (p, q)
    }
}

/// `(p_k, q_k)` for `k = -1..=n`, seeded by `p_{-1} = 1, q_{-1} = 0`,
/// `p_0 = A, q_0 = 1`, with `p_k = a_k p_{k-1} + eps_k p_{k-2}`.
pub fn convergents(e: &Expansion, n: usize) -> Result<Vec<ConvergentPair>> {
    if let Some(k) = e.available() {
        if n > k {
            return Err(Error::Domain(format!("asked for {n} convergents, expansion has {k} digits")));
        }
    }
    let mut out = vec![ConvergentPair::new(1, 0), ConvergentPair::new(e.int_part, 1)];
    for d in e.take(n) {
        let len = out.len();
        let (x1, x2) = (&out[len - 1], &out[len - 2]);
        let a = BigInt::from(d.a);
        let eps = BigInt::from(d.eps);
        let p = &a * &x1.p + &eps * &x2.p;
        let q = &a * &x1.q + &eps * &x2.q;
        out.push(ConvergentPair { p, q });
    }
    Ok(out)
}

/// `q^2 |x - p/q|`.
pub fn theta(x: &QuadSurd, p: &BigInt, q: &BigInt) -> Result<QuadSurd> {
    if q.is_zero() {
        return Err(Error::Domain("theta needs q >= 1".into()));
    }
    let qq = QuadSurd::from_int(q.clone());
    Ok((&qq * &(&(&qq * x) - &QuadSurd::from_int(p.clone()))).abs())
}

/// True iff re-expanding the value of `e` under the map for `alpha`
/// reproduces `e` digit for digit.
///
/// A truncated expansion is judged as if it terminated after its listed
/// digits.
pub fn validate_for_alpha(e: &Expansion, alpha: &QuadSurd) -> bool {
    if e.int_part != 0 {
        return false;
    }
    let x = if e.truncated { evaluate(e, e.preperiod.len()) } else { evaluate_exact(e) };
    let Ok(x) = x else { return false };
    if check_interval(&x, alpha).is_err() {
        return false;
    }
    let budget = e.listed().len() + 2;
    match expand(&x, alpha, budget) {
        Ok(f) => {
            let mut g = e.clone();
            g.truncated = false;
            g.canonicalize();
            f == g
        }
        Err(_) => false,
    }
}
