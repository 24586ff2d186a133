//! Exact rationals, quadratic surds and the few biquadratic values needed.

pub mod consts;
pub mod interval;
pub mod parse;
pub mod render;
pub mod surd;
pub mod tower;

pub use interval::Interval;
pub use num_rational::BigRational as Rational;
pub use parse::{parse_surd, parse_tower};
pub use render::{render_f64, render_surd, render_tower};
pub use surd::QuadSurd;
pub use tower::Tower;

/// Upper limit for enclosure precision requests.
pub const MAX_PRECISION_BITS: u32 = 4096;
