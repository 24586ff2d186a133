//! Fixed-point decimal rendering with round-half-even, decided exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::exact::surd::QuadSurd;
use crate::exact::tower::Tower;

/// Renders `x` with `digits` digits after the point.
///
/// `sign_minus(k)` must return the exact sign of `x - k`; `guess` is any
/// approximation of `x * 10^digits`.
fn render_with(sign_minus: impl Fn(&BigRational) -> i8, guess: BigInt, digits: u32) -> String {
    let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), digits as usize));
    let at = |m: &BigInt| sign_minus(&(BigRational::from_integer(m.clone()) / &scale));
    let mut m = guess;
    while at(&m) < 0 {
        m -= 1;
    }
    while at(&(&m + 1)) >= 0 {
        m += 1;
    }
    // m/10^n <= x < (m+1)/10^n; compare x with the midpoint
    let half = (BigRational::from_integer(m.clone()) + BigRational::new(1.into(), 2.into())) / &scale;
    let s = sign_minus(&half);
    if s > 0 || (s == 0 && m.is_odd()) {
        m += 1;
    }
    fixed(&m, digits)
}

fn fixed(m: &BigInt, digits: u32) -> String {
    let neg = m.is_negative();
    let s = m.abs().to_string();
    let d = digits as usize;
    let body = if d == 0 {
        s
    } else if s.len() > d {
        format!("{}.{}", &s[..s.len() - d], &s[s.len() - d..])
    } else {
        format!("0.{}{}", "0".repeat(d - s.len()), s)
    };
    if neg && !m.is_zero() {
        format!("-{body}")
    } else {
        body
    }
}

pub fn render_surd(x: &QuadSurd, digits: u32) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let enc = x.approx_unchecked(digits * 4 + 64);
    let guess = (enc.mid() * BigRational::from_integer(scale)).floor().to_integer();
    render_with(|k| (x - QuadSurd::from_rational(k)).signum(), guess, digits)
}

pub fn render_tower(x: &Tower, digits: u32) -> String {
    if let Some(q) = x.as_quad() {
        return render_surd(q, digits);
    }
    let scale = 10f64.powi(digits as i32);
    let guess = BigRational::from_float((x.to_f64() * scale).floor()).map(|r| r.to_integer()).unwrap_or_default();
    render_with(|k| x.sub(&Tower::pure(QuadSurd::from_rational(k))).map(|t| t.signum()).unwrap_or(0), guess, digits)
}

/// Exact decimal of an `f64` value, rounded half-even.
pub fn render_f64(x: f64, digits: u32) -> String {
    match QuadSurd::from_f64(x) {
        Some(q) => render_surd(&q, digits),
        None => format!("{x}"),
    }
}
