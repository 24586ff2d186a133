//! Boundary constants of the fundamental intervals below `sqrt2 - 1`, each
//! with the expansion it has under its own map.

use serde::{Deserialize, Serialize};

use crate::cf::{digits_from_str, expand, Expansion, SignedDigit};
use crate::domain::fundamental_interval;
use crate::error::{Error, Result};
use crate::exact::{consts, parse_surd, QuadSurd};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub value: QuadSurd,
    /// Expected self-expansion. When `prefix_only`, only the listed digits
    /// are known and the true expansion merely starts with them.
    pub expected: Expansion,
    pub prefix_only: bool,
    /// Leading decimals of the value.
    pub decimal: String,
}

fn entry(name: &str, value: QuadSurd, pre: &str, period: Option<&str>, decimal: &str) -> CatalogEntry {
    let pre = digits_from_str(pre).expect("catalog literal");
    let expected = match period {
        Some(p) => Expansion::periodic(pre, digits_from_str(p).expect("catalog literal")).expect("nonempty"),
        None => Expansion::finite(pre),
    };
    CatalogEntry { name: name.into(), value, expected, prefix_only: false, decimal: decimal.into() }
}

fn surd(s: &str) -> QuadSurd {
    parse_surd(s).expect("catalog literal")
}

pub fn catalog() -> Vec<CatalogEntry> {
    let mut last = entry(
        "(sqrt14401-89)/81",
        surd("quad:(-89,1,81,14401)"),
        "3,-3,-3,-2,-3,-4,-2,-3,-3,-4,-3,-2",
        None,
        "0.3827674",
    );
    last.prefix_only = true;
    vec![
        entry("sqrt2-1", consts::sqrt2m1(), "3", Some("-2,-4"), "0.4142135"),
        entry("(sqrt10-2)/3", consts::s10(), "3", Some("-3,-2,-3,-4"), "0.3874258"),
        entry("(5sqrt13-13)/13", consts::s13(), "3", Some("-3,-2,-4,-2,-3,-4,-2,-4"), "0.3867504"),
        entry("5/13", QuadSurd::ratio(5, 13), "3,-3,-2", None, "0.3846153"),
        entry("(sqrt65-5)/8", consts::s65(), "3", Some("-3,-3,-2,-3,-3,-4"), "0.3827822"),
        last,
        entry(
            "(sqrt2210-34)/34",
            surd("quad:(-34,1,34,2210)"),
            "3",
            Some("-3,-3,-2,-4,-2,-3,-3,-4,-2,-4"),
            "0.3826657",
        ),
        entry("13/34", QuadSurd::ratio(13, 34), "3,-3,-3,-2", None, "0.3823529"),
        entry("(sqrt442-13)/21", surd("quad:(-13,1,21,442)"), "3", Some("-3,-3,-3,-2,-3,-3,-3,-4"), "0.3820855"),
    ]
}

/// The expansion of `x` under the map for `alpha = x`.
pub fn self_expansion(x: &QuadSurd, max_digits: usize) -> Result<Expansion> {
    expand(x, x, max_digits)
}

/// Does the value reproduce its listed self-expansion exactly?
pub fn check_entry(e: &CatalogEntry) -> Result<bool> {
    if e.prefix_only {
        let want = &e.expected.preperiod;
        let got = self_expansion(&e.value, want.len())?;
        return Ok(got.take(want.len()) == *want);
    }
    Ok(self_expansion(&e.value, 256)? == e.expected)
}

/// Solves for the fundamental interval of `prefix` and checks that its
/// lower endpoint has the self-expansion the catalog lists for it.
pub fn endpoint_self_expansion_check(prefix: &[SignedDigit]) -> Result<bool> {
    let lo = fundamental_interval(prefix)?.lo;
    let e = catalog()
        .into_iter()
        .find(|e| e.value == lo)
        .ok_or_else(|| Error::UnsupportedPrefix(format!("no catalog entry for the endpoint {lo}")))?;
    check_entry(&e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_entries_reproduce() {
        let cat = catalog();
        for e in &cat {
            assert!(check_entry(e).unwrap(), "{}", e.name);
            assert!(format!("{:.7}", e.value.to_f64()).starts_with(&e.decimal[..8]), "{}", e.name);
        }
        // listed in decreasing order
        assert!(cat.windows(2).all(|w| w[0].value > w[1].value));
    }

    #[test]
    fn endpoints_of_solved_intervals() {
        for p in ["2", "3,-2", "3,-3,-2", "3,-3,-2,-3"] {
            assert!(endpoint_self_expansion_check(&digits_from_str(p).unwrap()).unwrap(), "{p}");
        }
        assert!(matches!(
            endpoint_self_expansion_check(&digits_from_str("1").unwrap()),
            Err(Error::UnsupportedPrefix(_))
        ));
    }
}
