//! Alpha-continued fractions with exact arithmetic: signed-digit
//! expansions, the singularisation and insertion calculus, natural-extension
//! domains, invariant-measure diagnostics and alpha-Legendre constants.

pub mod catalog;
pub mod cf;
pub mod domain;
pub mod ergodic;
pub mod error;
pub mod exact;
pub mod legendre;
pub mod mobius;
pub mod rewrite;

pub use cf::{
    convergents, digit, evaluate, evaluate_exact, expand, nat_ext_inverse, nat_ext_step, theta, ConvergentPair,
    Expansion, NatExtPoint, SignedDigit,
};
pub use domain::{build_domain, Membership, Rect, RectUnion, Regime};
pub use ergodic::{OrbitSample, SimConfig};
pub use error::{Error, Result};
pub use exact::{parse_surd, parse_tower, QuadSurd, Rational, Tower};
pub use legendre::{legendre_constant, LegendreFormula};
pub use mobius::Mobius;
pub use rewrite::RewriteTrace;
