//! Signed-digit strings `[A; e1 a1, e2 a2, ...]`, possibly eventually periodic.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::QuadSurd;
use crate::mobius::Mobius;

/// One partial quotient with the sign that precedes it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedDigit {
    pub eps: i8,
    pub a: u64,
}

impl SignedDigit {
    pub fn new(eps: i8, a: u64) -> Self {
        debug_assert!(eps == 1 || eps == -1);
        SignedDigit { eps, a }
    }

    pub fn pos(a: u64) -> Self {
        Self::new(1, a)
    }

    pub fn neg(a: u64) -> Self {
        Self::new(-1, a)
    }

    /// Digit from a signed integer: `3 -> (+1, 3)`, `-2 -> (-1, 2)`.
    pub fn from_signed(n: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("digit 0 is not a partial quotient".into()));
        }
        Ok(Self::new(n.signum() as i8, n.unsigned_abs()))
    }

    pub fn signed(&self) -> i64 {
        self.eps as i64 * self.a as i64
    }

    pub fn matrix(&self) -> Mobius {
        Mobius::digit(self.eps, self.a)
    }
}

impl fmt::Display for SignedDigit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signed())
    }
}

/// Parses `"3, -2, -4"` into digits.
pub fn digits_from_str(s: &str) -> Result<Vec<SignedDigit>> {
    s.split([',', ' '])
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let n: i64 = t.parse().map_err(|_| Error::Parse(format!("bad digit `{t}`")))?;
            SignedDigit::from_signed(n)
        })
        .collect()
}

fn is_zero_i64(n: &i64) -> bool {
    *n == 0
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// `x = A + e1/(a1 + e2/(a2 + ...))`.
///
/// `period: None` with `truncated: false` is a terminating expansion;
/// `truncated: true` means the digit budget ran out before the orbit
/// terminated or repeated, so `preperiod` is only a prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Expansion {
    #[serde(default, skip_serializing_if = "is_zero_i64")]
    pub int_part: i64,
    pub preperiod: Vec<SignedDigit>,
    pub period: Option<Vec<SignedDigit>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub truncated: bool,
}

impl Expansion {
    pub fn finite(digits: Vec<SignedDigit>) -> Self {
        Expansion { int_part: 0, preperiod: digits, period: None, truncated: false }
    }

    /// Eventually periodic expansion, brought to minimal form.
    pub fn periodic(preperiod: Vec<SignedDigit>, period: Vec<SignedDigit>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Domain("period must be nonempty".into()));
        }
        let mut e = Expansion { int_part: 0, preperiod, period: Some(period), truncated: false };
        e.canonicalize();
        Ok(e)
    }

    /// Terminating expansion from signed integers, e.g. `&[3, -2]`.
    pub fn from_signed(ds: &[i64]) -> Result<Self> {
        Ok(Self::finite(ds.iter().map(|&n| SignedDigit::from_signed(n)).collect::<Result<_>>()?))
    }

    pub fn with_int_part(mut self, a: i64) -> Self {
        self.int_part = a;
        self
    }

    /// Shortest period and preperiod describing the same digit sequence.
    pub fn canonicalize(&mut self) {
        let Some(per) = self.period.as_mut() else { return };
        let n = per.len();
        for k in 1..=n {
            if n % k == 0 && (k..n).all(|i| per[i] == per[i - k]) {
                per.truncate(k);
                break;
            }
        }
        while let (Some(last), Some(plast)) = (self.preperiod.last(), per.last()) {
            if last != plast {
                break;
            }
            self.preperiod.pop();
            per.rotate_right(1);
        }
    }

    pub fn is_terminating(&self) -> bool {
        self.period.is_none() && !self.truncated
    }

    pub fn is_periodic(&self) -> bool {
        self.period.is_some()
    }

    /// Number of digits available, `None` for periodic (unbounded) streams.
    pub fn available(&self) -> Option<usize> {
        if self.period.is_some() {
            None
        } else {
            Some(self.preperiod.len())
        }
    }

    /// Digit `i` (1-based) if available.
    pub fn digit(&self, i: usize) -> Option<SignedDigit> {
        if i == 0 {
            return None;
        }
        let j = i - 1;
        if j < self.preperiod.len() {
            return Some(self.preperiod[j]);
        }
        let per = self.period.as_ref()?;
        Some(per[(j - self.preperiod.len()) % per.len()])
    }

    /// First `n` digits, cycling the period; fewer if the expansion ends.
    pub fn take(&self, n: usize) -> Vec<SignedDigit> {
        (1..=n).map_while(|i| self.digit(i)).collect()
    }

    /// All digits of a finite expansion, or pre + one copy of the period.
    pub fn listed(&self) -> Vec<SignedDigit> {
        let mut v = self.preperiod.clone();
        if let Some(p) = &self.period {
            v.extend_from_slice(p);
        }
        v
    }

    /// Möbius map of the first `n` digits including the integer part:
    /// `x = M(tail)` where `tail` is the value after digit `n`.
    pub fn prefix_matrix(&self, n: usize) -> Mobius {
        let mut m = Mobius::shift(self.int_part);
        for d in self.take(n) {
            m = m.compose(&d.matrix());
        }
        m
    }

    /// Finite expansion with the integer part and the given digits.
    pub fn with_digits(&self, digits: Vec<SignedDigit>) -> Self {
        Expansion { int_part: self.int_part, preperiod: digits, period: None, truncated: false }
    }

    pub fn int_part_big(&self) -> BigInt {
        BigInt::from(self.int_part)
    }

    /// Value as exact surd: terminating expansions evaluate directly and
    /// periodic ones through the attracting fixed point of the period map.
    pub fn value(&self) -> Result<QuadSurd> {
        crate::cf::evaluate_exact(self)
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[SignedDigit]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ");
        let listed = self.listed();
        write!(f, "[{}", self.int_part)?;
        if !listed.is_empty() {
            write!(f, "; {}", join(&listed))?;
        }
        if self.truncated {
            write!(f, ", ...")?;
        }
        if let Some(p) = &self.period {
            write!(f, " | period: {}", join(p))?;
        }
        write!(f, "]")
    }
}

impl FromStr for Expansion {
    type Err = Error;

    /// Reads the display format back, e.g. `[0; 3, -2, -4 | period: -2, -4]`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expansion must be bracketed: `{s}`")))?;
        let (body, period) = match inner.split_once('|') {
            Some((b, p)) => {
                let p = p.trim();
                let p = p.strip_prefix("period:").unwrap_or(p);
                (b, Some(digits_from_str(p)?))
            }
            None => (inner, None),
        };
        let (ip, rest) = body.split_once(';').unwrap_or((body, ""));
        let int_part: i64 = ip.trim().parse().map_err(|_| Error::Parse(format!("bad integer part in `{s}`")))?;
        let mut rest = rest.trim().trim_end_matches(',').to_string();
        let truncated = rest.ends_with("...");
        if truncated {
            rest = rest.trim_end_matches("...").trim().trim_end_matches(',').to_string();
        }
        let mut listed = digits_from_str(&rest)?;
        let e = match period {
            Some(p) => {
                // the listing shows the preperiod followed by one period copy
                if listed.len() >= p.len() && listed[listed.len() - p.len()..] == p[..] {
                    listed.truncate(listed.len() - p.len());
                }
                let mut e = Expansion::periodic(listed, p)?;
                e.int_part = int_part;
                e
            }
            None => Expansion { int_part, preperiod: listed, period: None, truncated },
        };
        Ok(e)
    }
}
