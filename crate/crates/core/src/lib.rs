//! Exact positivity tests for Q- and R-divisors on surfaces, built on the
//! integral part `[D]` of a divisor.

pub mod auditor;
pub mod divisor;
pub mod error;
pub mod exact_numbers;
pub mod positivity;
pub mod surface;

pub use divisor::{RDivisor, Representation, ZDivisor};
pub use error::{Error, Result};
pub use exact_numbers::{weyl_find, QuadExt};
pub use surface::{CurveClass, SurfaceModel};
