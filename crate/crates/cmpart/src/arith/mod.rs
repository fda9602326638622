//! Certified arbitrary-precision arithmetic: floats, magnitudes, real and
//! complex balls, and the elementary functions needed for q-series
//! evaluation at CM points.

pub mod complex;
pub mod float;
pub mod functions;
pub mod mag;
pub mod real;

pub use complex::Complex;
pub use float::Float;
pub use functions::{exp, pi, sin_cos};
pub use mag::Mag;
pub use real::{recognize_integer, Real};
