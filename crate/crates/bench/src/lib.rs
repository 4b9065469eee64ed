//! Fixtures shared by the benchmarks.

use floorcone::auditor::{sample_divisors, CoefficientProfile};
use floorcone::{RDivisor, SurfaceModel};

pub fn f2() -> SurfaceModel {
    SurfaceModel::hirzebruch(2).expect("builtin")
}

/// Seeded rational divisors on `s`.
pub fn rational_sample(s: &SurfaceModel, n: usize) -> Vec<RDivisor> {
    sample_divisors(s, &CoefficientProfile::Rational { max_num: 30, max_den: 12 }, 42, 0, n)
}

/// Seeded divisors over Q(sqrt 2) on `s`.
pub fn quadratic_sample(s: &SurfaceModel, n: usize) -> Vec<RDivisor> {
    sample_divisors(s, &CoefficientProfile::Quadratic { d: 2, height: 10, max_den: 6 }, 42, 0, n)
}
