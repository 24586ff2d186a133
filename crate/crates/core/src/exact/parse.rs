//! String syntax for exact numbers.
//!
//! Accepted forms: `rat:p/q`, `quad:(p,q,r,d)`, plain integers and fractions
//! `p/q`, decimal literals such as `0.45` or `-1.5e-3` (converted to the
//! exact rational they denote), and the names `g`, `G`, `g2`, `sqrt2m1`,
//! `s10`, `s65`, `s13`. The quartic threshold `gtilde` is accepted only by
//! [`parse_tower`].

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::consts;
use crate::exact::surd::QuadSurd;
use crate::exact::tower::Tower;

fn perr(s: &str, why: &str) -> Error {
    Error::Parse(format!("`{s}`: {why}"))
}

fn int(s: &str, whole: &str) -> Result<BigInt> {
    s.trim().parse::<BigInt>().map_err(|_| perr(whole, "expected an integer"))
}

fn fraction(body: &str, whole: &str) -> Result<QuadSurd> {
    match body.split_once('/') {
        Some((n, d)) => {
            let d = int(d, whole)?;
            if d.is_zero() {
                return Err(perr(whole, "zero denominator"));
            }
            Ok(QuadSurd::new(int(n, whole)?, 0, d, 0)?)
        }
        None => Ok(QuadSurd::from_int(int(body, whole)?)),
    }
}

fn decimal(s: &str) -> Result<QuadSurd> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| perr(s, "bad exponent"))?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(perr(s, "empty number"));
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(perr(s, "not a number"));
    }
    let digits = format!("{ip}{fp}");
    let mut num = if digits.is_empty() { BigInt::zero() } else { digits.parse::<BigInt>().unwrap() };
    if neg {
        num = -num;
    }
    let e = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut den = BigInt::one();
    if e >= 0 {
        num *= num_traits::pow(ten, e as usize);
    } else {
        den = num_traits::pow(ten, (-e) as usize);
    }
    QuadSurd::new(num, 0, den, 0)
}

/// Parses a quadratic-surd literal.
pub fn parse_surd(s: &str) -> Result<QuadSurd> {
    let t = s.trim();
    if let Some(body) = t.strip_prefix("rat:") {
        return fraction(body, s);
    }
    if let Some(body) = t.strip_prefix("quad:") {
        let inner = body
            .trim()
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(|| perr(s, "expected quad:(p,q,r,d)"))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 4 {
            return Err(perr(s, "expected four integers"));
        }
        let d = int(parts[3], s)?;
        let d: u64 = d.try_into().map_err(|_| perr(s, "radicand must be a nonnegative u64"))?;
        let r = int(parts[2], s)?;
        if r.is_zero() {
            return Err(Error::Domain(format!("`{s}`: zero denominator")));
        }
        return QuadSurd::new(int(parts[0], s)?, int(parts[1], s)?, r, d);
    }
    if let Some(c) = consts::by_name(t) {
        return Ok(c);
    }
    if t == "gtilde" {
        return Err(perr(s, "gtilde is quartic; it is accepted only where tower values are"));
    }
    if t.contains('/') {
        return fraction(t, s);
    }
    decimal(t)
}

/// Like [`parse_surd`] but also accepts `gtilde`.
pub fn parse_tower(s: &str) -> Result<Tower> {
    if s.trim() == "gtilde" {
        return Ok(consts::gtilde());
    }
    parse_surd(s).map(Tower::pure)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_surd("rat:3/6").unwrap(), QuadSurd::ratio(1, 2));
        assert_eq!(parse_surd("quad:(-3,1,4,17)").unwrap(), QuadSurd::new(-3, 1, 4, 17).unwrap());
        assert_eq!(parse_surd("0.45").unwrap(), QuadSurd::ratio(9, 20));
        assert_eq!(parse_surd("-1.5e-3").unwrap(), QuadSurd::ratio(-3, 2000));
        assert_eq!(parse_surd("2e2").unwrap(), QuadSurd::from_int(200));
        assert_eq!(parse_surd(".5").unwrap(), QuadSurd::ratio(1, 2));
        assert_eq!(parse_surd("g").unwrap(), consts::g());
        assert_eq!(parse_surd("7/10").unwrap(), QuadSurd::ratio(7, 10));
        assert!(parse_surd("rat:1/0").is_err());
        assert!(parse_surd("abc").is_err());
        assert!(parse_surd("quad:(1,2,3)").is_err());
        assert!(parse_surd("gtilde").is_err());
        assert!(parse_tower("gtilde").is_ok());
        let g = consts::g();
        assert_eq!(parse_surd(&g.to_syntax()).unwrap(), g);
    }
}
