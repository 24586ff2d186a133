//! Named constants that recur as regime boundaries.

use crate::exact::surd::QuadSurd;
use crate::exact::tower::Tower;

fn q(p: i64, qq: i64, r: i64, d: u64) -> QuadSurd {
    QuadSurd::new(p, qq, r, d).expect("constant has nonzero denominator")
}

/// Small golden ratio `(sqrt5 - 1)/2`.
pub fn g() -> QuadSurd {
    q(-1, 1, 2, 5)
}

/// Golden ratio `(sqrt5 + 1)/2 = 1/g`.
pub fn big_g() -> QuadSurd {
    q(1, 1, 2, 5)
}

/// `g^2 = 1 - g`.
pub fn g2() -> QuadSurd {
    q(3, -1, 2, 5)
}

pub fn sqrt2m1() -> QuadSurd {
    q(-1, 1, 1, 2)
}

/// `(sqrt10 - 2)/3`.
pub fn s10() -> QuadSurd {
    q(-2, 1, 3, 10)
}

/// `(sqrt65 - 5)/8`.
pub fn s65() -> QuadSurd {
    q(-5, 1, 8, 65)
}

/// `(5 sqrt13 - 13)/13`.
pub fn s13() -> QuadSurd {
    q(-13, 5, 13, 13)
}

/// The threshold `(g - 2 + sqrt(g^2 + 4)) / (2g)` where the Legendre
/// constant switches from `1 - alpha` to `alpha / (1 + g alpha)`.
///
/// It is the positive root of `g x^2 + (2 - g) x - 1`, quartic over `Q`.
pub fn gtilde() -> Tower {
    let two_g = &g() * 2;
    let u = (g() - 2) / &two_g;
    let w = QuadSurd::one() / &two_g;
    let dd = &g() * &g() + 4;
    Tower::new(u, w, dd).expect("g^2 + 4 is positive")
}

/// Looks up a constant by the names the string syntax accepts.
pub fn by_name(name: &str) -> Option<QuadSurd> {
    Some(match name {
        "g" => g(),
        "G" => big_g(),
        "g2" => g2(),
        "sqrt2m1" => sqrt2m1(),
        "s10" => s10(),
        "s65" => s65(),
        "s13" => s13(),
        _ => return None,
    })
}
