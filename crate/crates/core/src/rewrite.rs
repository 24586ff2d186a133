//! Singularisation, insertion and the compound rewrites built from them.
//!
//! Every operation takes a 1-based digit site `i`. The digit before the
//! site (or the integer part when `i = 1`) absorbs the change of the
//! identity's leading term, so values are preserved exactly.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cf::{convergents, ConvergentPair, Expansion, SignedDigit};
use crate::domain::fib;
use crate::error::{Error, Result};
use crate::exact::QuadSurd;
use crate::mobius::Mobius;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewriteKind {
    Singularise,
    Insert,
    Compensated,
    Block(usize),
    DoubleCompensated,
}

impl fmt::Display for RewriteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewriteKind::Singularise => write!(f, "singularise"),
            RewriteKind::Insert => write!(f, "insert"),
            RewriteKind::Compensated => write!(f, "compensated"),
            RewriteKind::Block(k) => write!(f, "block({k})"),
            RewriteKind::DoubleCompensated => write!(f, "double_compensated"),
        }
    }
}

/// How one convergent fared under a rewrite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "change", rename_all = "snake_case")]
pub enum ConvergentChange {
    /// `p_index / q_index` of the old expansion is gone.
    Lost { index: usize, p: BigInt, q: BigInt },
    /// The same fraction sits at a different index.
    Shifted { from: usize, to: usize },
    /// New convergent `index` equals `(p_of + sign p_{of-1}) / (q_of + sign q_{of-1})`
    /// of the old expansion.
    Mediant { index: usize, p: BigInt, q: BigInt, of: usize, sign: i8 },
    /// New convergent with no relation to the old list.
    New { index: usize, p: BigInt, q: BigInt },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteTrace {
    pub before: Expansion,
    pub after: Expansion,
    pub site: usize,
    pub kind: RewriteKind,
    /// Leading digits of `before` / `after` that contain every change.
    pub span_before: usize,
    pub span_after: usize,
    pub convergent_delta: Vec<ConvergentChange>,
}

/// Digits of `e` with any period unrolled far enough that the first `upto`
/// digits are explicit. Returns the explicit digits and the (rotated) period.
fn unroll(e: &Expansion, upto: usize) -> (Vec<SignedDigit>, Option<Vec<SignedDigit>>) {
    let mut pre = e.preperiod.clone();
    let mut per = e.period.clone();
    if let Some(p) = per.as_mut() {
        while pre.len() < upto {
            pre.push(p[0]);
            p.rotate_left(1);
        }
    }
    (pre, per)
}

fn rebuild(e: &Expansion, int_part: i64, pre: Vec<SignedDigit>, per: Option<Vec<SignedDigit>>) -> Result<Expansion> {
    let out = match per {
        Some(p) => Expansion::periodic(pre, p)?,
        None => Expansion { truncated: e.truncated, ..Expansion::finite(pre) },
    };
    Ok(out.with_int_part(int_part))
}

/// Adds `delta` to the partial quotient before site `i` (the integer part for `i = 1`).
fn bump(int_part: &mut i64, ds: &mut [SignedDigit], i: usize, delta: i64) -> Result<()> {
    if i == 1 {
        *int_part += delta;
        return Ok(());
    }
    let d = &mut ds[i - 2];
    let a = d.a as i64 + delta;
    if a < 1 {
        return Err(Error::NotApplicable(format!("digit {} would become {a}", i - 1)));
    }
    d.a = a as u64;
    Ok(())
}

fn check_site(ds: &[SignedDigit], i: usize) -> Result<SignedDigit> {
    if i == 0 || i > ds.len() {
        return Err(Error::Domain(format!("site {i} is outside the expansion")));
    }
    Ok(ds[i - 1])
}

fn shifted(eps: i8, a: u64, delta: i8) -> Result<SignedDigit> {
    let v = a as i64 + delta as i64;
    if v < 1 {
        return Err(Error::NotApplicable(format!("partial quotient {a}{delta:+} is not positive")));
    }
    Ok(SignedDigit::new(eps, v as u64))
}

/// Replaces `ds[i-1 .. i-1+len]` by `new` and assembles the trace.
#[allow(clippy::too_many_arguments)]
fn finish(
    e: &Expansion,
    mut int_part: i64,
    mut ds: Vec<SignedDigit>,
    per: Option<Vec<SignedDigit>>,
    i: usize,
    len: usize,
    new: Vec<SignedDigit>,
    delta: i64,
    kind: RewriteKind,
) -> Result<RewriteTrace> {
    bump(&mut int_part, &mut ds, i, delta)?;
    let span_after = i - 1 + new.len();
    ds.splice(i - 1..i - 1 + len, new);
    let after = rebuild(e, int_part, ds, per)?;
    let mut tr = RewriteTrace {
        before: e.clone(),
        after,
        site: i,
        kind,
        span_before: i - 1 + len,
        span_after,
        convergent_delta: vec![],
    };
    tr.convergent_delta = convergent_diff(&tr)?;
    Ok(tr)
}

/// `A + 1/(1 + eps/(B + x)) = (A + 1) - eps/(B + eps + x)`: removes a `+1`.
pub fn singularise(e: &Expansion, i: usize) -> Result<RewriteTrace> {
    let (ds, per) = unroll(e, i + 1);
    let d = check_site(&ds, i)?;
    if d != SignedDigit::pos(1) {
        return Err(Error::NotSingularisable { site: i, digit: d.to_string() });
    }
    let (len, new) = match ds.get(i) {
        None => (1, vec![]),
        Some(&next) => (2, vec![shifted(-next.eps, next.a, next.eps)?]),
    };
    finish(e, e.int_part, ds, per, i, len, new, 1, RewriteKind::Singularise)
}

/// `A + eps/(B + x) = (A + eps) - eps/(1 + 1/(B - 1 + x))`: puts a `1` in
/// front of digit `i`. `sign` must be the sign of that digit.
pub fn insert(e: &Expansion, i: usize, sign: i8) -> Result<RewriteTrace> {
    let (ds, per) = unroll(e, i);
    let d = check_site(&ds, i)?;
    if d.a < 2 {
        return Err(Error::NotInsertable { site: i, reason: "partial quotient is 1".into() });
    }
    if d.eps != sign {
        return Err(Error::NotInsertable { site: i, reason: format!("digit sign is {:+}, not {sign:+}", d.eps) });
    }
    let new = vec![SignedDigit::new(-d.eps, 1), SignedDigit::pos(d.a - 1)];
    finish(e, e.int_part, ds, per, i, 1, new, d.eps as i64, RewriteKind::Insert)
}

/// Insertion before a `2` followed by singularisation of the resulting `1`:
/// `eps1 2, eps2 C -> (pred + eps1), -eps1 2, -eps2 (C + eps2)`.
pub fn compensated_insert(e: &Expansion, i: usize) -> Result<RewriteTrace> {
    let (ds, per) = unroll(e, i + 1);
    let d = check_site(&ds, i)?;
    if d.a != 2 {
        return Err(Error::NotApplicable(format!("digit {i} is {d}, not ±2")));
    }
    let (len, mut new) = (1, vec![SignedDigit::new(-d.eps, 2)]);
    let len = match ds.get(i) {
        None => len,
        Some(&next) => {
            new.push(shifted(-next.eps, next.a, next.eps)?);
            2
        }
    };
    finish(e, e.int_part, ds, per, i, len, new, d.eps as i64, RewriteKind::Compensated)
}

/// Length of the block `3, (-3)^(k-1), -2` starting at site `i`, i.e. `k`.
fn block_len(ds: &[SignedDigit], i: usize) -> Option<usize> {
    if ds.get(i - 1) != Some(&SignedDigit::pos(3)) {
        return None;
    }
    let mut j = i;
    while ds.get(j) == Some(&SignedDigit::neg(3)) {
        j += 1;
    }
    (ds.get(j) == Some(&SignedDigit::neg(2))).then_some(j + 1 - i)
}

/// `3, (-3)^(k-1), -2, eps a -> (pred + 1), -2, (-3)^k, -eps (a + eps)`.
pub fn block_rewrite(e: &Expansion, i: usize, k: usize) -> Result<RewriteTrace> {
    if k == 0 {
        return Err(Error::PatternMismatch("block length must be at least 1".into()));
    }
    let (ds, per) = unroll(e, i + k + 1);
    check_site(&ds, i)?;
    if block_len(&ds, i) != Some(k) {
        return Err(Error::PatternMismatch(format!("no block 3, (-3)^{}, -2 at digit {i}", k - 1)));
    }
    let mut new = vec![SignedDigit::neg(2)];
    new.extend(std::iter::repeat_n(SignedDigit::neg(3), k));
    let len = match ds.get(i + k) {
        None => k + 1,
        Some(&next) => {
            new.push(shifted(-next.eps, next.a, next.eps)?);
            k + 2
        }
    };
    finish(e, e.int_part, ds, per, i, len, new, 1, RewriteKind::Block(k))
}

/// `3, -3, -2, -3, -a -> (pred + 1), -2, -3, -4, -2, a - 1` for `a >= 4`;
/// when the expansion stops after the second `-3`, the tail is dropped.
pub fn double_compensated_rewrite(e: &Expansion, i: usize) -> Result<RewriteTrace> {
    let (ds, per) = unroll(e, i + 4);
    check_site(&ds, i)?;
    let head = [SignedDigit::pos(3), SignedDigit::neg(3), SignedDigit::neg(2), SignedDigit::neg(3)];
    if ds.len() < i + 3 || ds[i - 1..i + 3] != head {
        return Err(Error::PatternMismatch(format!("no 3, -3, -2, -3 at digit {i}")));
    }
    let mut new = vec![SignedDigit::neg(2), SignedDigit::neg(3), SignedDigit::neg(4), SignedDigit::neg(2)];
    let len = match ds.get(i + 3) {
        None => 4,
        Some(&next) if next.eps == -1 && next.a >= 4 => {
            new.push(SignedDigit::pos(next.a - 1));
            5
        }
        Some(&next) => {
            return Err(Error::PatternMismatch(format!("digit {} is {next}, need -a with a >= 4", i + 4)));
        }
    };
    finish(e, e.int_part, ds, per, i, len, new, 1, RewriteKind::DoubleCompensated)
}

/// Both sides of the k-block rewrite as digit-matrix products:
/// `D(e_n, a_n) D(+3) D(-3)^(k-1) D(-2) D(e_m, a_m)` and
/// `D(e_n, a_n + 1) D(-2) D(-3)^k D(-e_m, a_m + e_m)`.
pub fn block_product(k: usize, eps_n: i8, a_n: u64, eps_m: i8, a_m: u64) -> Result<(Mobius, Mobius)> {
    if k == 0 || a_m < 2 {
        return Err(Error::Domain("block products need k >= 1 and a_m >= 2".into()));
    }
    let d = Mobius::digit;
    let mut lhs = d(eps_n, a_n).compose(&d(1, 3));
    for _ in 1..k {
        lhs = lhs.compose(&d(-1, 3));
    }
    let lhs = lhs.compose(&d(-1, 2)).compose(&d(eps_m, a_m));
    let mut rhs = d(eps_n, a_n + 1).compose(&d(-1, 2));
    for _ in 0..k {
        rhs = rhs.compose(&d(-1, 3));
    }
    let a_m2 = (a_m as i64 + eps_m as i64) as u64;
    Ok((lhs, rhs.compose(&d(-eps_m, a_m2))))
}

/// The product in Fibonacci form with leading index `j`:
/// `[[F_j e_n, F_j e_n a_m + F_{j-1} e_n e_m],
///   [F_j a_n + F_{j-2}, F_j a_n a_m + F_{j-1} e_m a_n + F_{j-2} a_m + F_{j-3} e_m]]`.
/// The k-block products match it for `j = 2k + 3`.
pub fn block_product_fibonacci(j: i64, eps_n: i8, a_n: u64, eps_m: i8, a_m: u64) -> Mobius {
    let f = |i: i64| fib(i);
    let (en, em) = (BigInt::from(eps_n), BigInt::from(eps_m));
    let (an, am) = (BigInt::from(a_n), BigInt::from(a_m));
    Mobius::new(
        f(j) * &en,
        f(j) * &en * &am + f(j - 1) * &en * &em,
        f(j) * &an + f(j - 2),
        f(j) * &an * &am + f(j - 1) * &em * &an + f(j - 2) * &am + f(j - 3) * &em,
    )
}

/// Compares convergents over the changed spans (plus one digit of context).
pub fn convergent_diff(tr: &RewriteTrace) -> Result<Vec<ConvergentChange>> {
    let window = |e: &Expansion, span: usize| match e.available() {
        Some(n) => n.min(span + 1),
        None => span + 1,
    };
    let nb = window(&tr.before, tr.span_before);
    let na = window(&tr.after, tr.span_after);
    // index 0 of these lists is k = -1
    let cb = convergents(&tr.before, nb)?;
    let ca = convergents(&tr.after, na)?;
    let key = |c: &ConvergentPair| c.reduced();
    let mut before_at: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    for (j, c) in cb.iter().enumerate().skip(1) {
        before_at.entry(key(c)).or_insert(j - 1);
    }
    let after_keys: HashMap<(BigInt, BigInt), usize> =
        ca.iter().enumerate().skip(1).map(|(j, c)| (key(c), j - 1)).collect();
    let mut out = Vec::new();
    for (j, c) in cb.iter().enumerate().skip(1) {
        let k = j - 1;
        match after_keys.get(&key(c)) {
            None => out.push(ConvergentChange::Lost { index: k, p: c.p.clone(), q: c.q.clone() }),
            Some(&to) if to != k => out.push(ConvergentChange::Shifted { from: k, to }),
            Some(_) => {}
        }
    }
    for (j, c) in ca.iter().enumerate().skip(1) {
        let k = j - 1;
        let kc = key(c);
        if before_at.contains_key(&kc) {
            continue;
        }
        let mediant = (1..cb.len()).find_map(|jb| {
            [1i8, -1].into_iter().find_map(|s| {
                let (x, y) = (&cb[jb], &cb[jb - 1]);
                let m = ConvergentPair { p: &x.p + BigInt::from(s) * &y.p, q: &x.q + BigInt::from(s) * &y.q };
                (key(&m) == kc).then_some((jb - 1, s))
            })
        });
        out.push(match mediant {
            Some((of, sign)) => ConvergentChange::Mediant { index: k, p: c.p.clone(), q: c.q.clone(), of, sign },
            None => ConvergentChange::New { index: k, p: c.p.clone(), q: c.q.clone() },
        });
    }
    Ok(out)
}

/// Futures `t_0..t_n` of a terminating expansion, computed backwards.
fn futures(ds: &[SignedDigit]) -> Result<Vec<QuadSurd>> {
    let mut ts = vec![QuadSurd::zero(); ds.len() + 1];
    for n in (0..ds.len()).rev() {
        let den = QuadSurd::from_int(ds[n].a) + ts[n + 1].clone();
        if den.is_zero() {
            return Err(Error::DivergentTail { terms: n + 1 });
        }
        ts[n] = QuadSurd::from_int(ds[n].eps as i64) / den;
    }
    Ok(ts)
}

/// Applies the rule matching the digits at site `i`.
pub fn rewrite_at(e: &Expansion, i: usize) -> Result<RewriteTrace> {
    let ds = &e.preperiod;
    let d = check_site(ds, i)?;
    match (d.eps, d.a) {
        (1, 1) => singularise(e, i),
        (_, 2) => compensated_insert(e, i),
        (1, 3) => match double_compensated_rewrite(e, i) {
            Ok(tr) => Ok(tr),
            Err(_) => match block_len(ds, i) {
                Some(k) => block_rewrite(e, i, k),
                None => Err(Error::NotApplicable(format!("no rewrite rule fits 3 at digit {i}"))),
            },
        },
        _ => Err(Error::NotApplicable(format!("no rewrite rule fits digit {i} = {d}"))),
    }
}

/// Rewrites a terminating expansion until every future lies in
/// `[alpha - 1, alpha)`, always fixing the smallest offending index `n`
/// at digit `n + 1`. Returns the final expansion and the trace of steps.
pub fn rewrite_to_alpha(e: &Expansion, alpha: &QuadSurd) -> Result<(Expansion, Vec<RewriteTrace>)> {
    if !e.is_terminating() {
        return Err(Error::NotApplicable("rewriting to a new alpha needs a terminating expansion".into()));
    }
    if alpha.signum() <= 0 || *alpha > QuadSurd::one() {
        return Err(Error::Domain(format!("alpha = {alpha} is outside (0, 1]")));
    }
    let lo = alpha - &QuadSurd::one();
    let mut cur = e.clone();
    let mut log = Vec::new();
    let cap = 4 * (e.preperiod.len() + 4) * (e.preperiod.len() + 4);
    for _ in 0..cap {
        let ts = futures(&cur.preperiod)?;
        let Some(n) = ts.iter().position(|t| *t < lo || t >= alpha) else {
            return Ok((cur, log));
        };
        if n == cur.preperiod.len() {
            return Err(Error::NotApplicable("final future out of range".into()));
        }
        let tr = rewrite_at(&cur, n + 1)?;
        cur = tr.after.clone();
        log.push(tr);
    }
    Err(Error::NotApplicable("rewriting did not settle".into()))
}
