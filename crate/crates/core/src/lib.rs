pub mod algebraic;
pub mod dimension;
pub mod dyadic;
pub mod error;
pub mod expansion;
pub mod interval;
pub mod isolated_points;
pub mod poly;
pub mod real;
pub mod scalar;
pub mod solver;
pub mod univoque_x;
pub mod verify;
pub mod words;

pub use dyadic::{Dyadic, Rounding};
pub use error::{Error, Result};
pub use interval::Interval;
pub use real::Real;
pub use scalar::Scalar;

/// Certified enclosure with arbitrary-precision binary endpoints.
pub type PrecisionReal = Interval<Dyadic>;
/// Enclosure with exact rational endpoints.
pub type ExactInterval = Interval<num_rational::BigRational>;
/// Enclosure with `f64` endpoints.
pub type Interval64 = Interval<f64>;
/// Enclosure with `f32` endpoints.
pub type Interval32 = Interval<f32>;
