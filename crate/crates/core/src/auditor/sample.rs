use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::CoefficientProfile;
use crate::divisor::RDivisor;
use crate::exact_numbers::QuadExt;
use crate::surface::SurfaceModel;

fn ratio(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> BigRational {
    let p = rng.gen_range(-max_num..=max_num);
    let q = rng.gen_range(1..=max_den);
    BigRational::new(p.into(), q.into())
}

fn coefficient(rng: &mut ChaCha8Rng, profile: &CoefficientProfile) -> QuadExt {
    match *profile {
        CoefficientProfile::Rational { max_num, max_den } => QuadExt::rational(ratio(rng, max_num, max_den)),
        CoefficientProfile::Quadratic { d, height, max_den } => {
            QuadExt::new(ratio(rng, height, max_den), ratio(rng, height, max_den), d)
        }
    }
}

/// `n` divisors drawn uniformly from the profile's box, skipping zero and,
/// for quadratic profiles, rational draws. Stream `stream` of the seed.
pub fn sample_divisors(s: &SurfaceModel, profile: &CoefficientProfile, seed: u64, stream: u64, n: usize) -> Vec<RDivisor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let quadratic = matches!(profile, CoefficientProfile::Quadratic { .. });
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let coords: Vec<QuadExt> = (0..s.rank()).map(|_| coefficient(&mut rng, profile)).collect();
        if coords.iter().all(|c| c.is_zero()) || (quadratic && coords.iter().all(|c| c.is_rational())) {
            continue;
        }
        out.push(RDivisor::from_coords(s, &coords).expect("coordinates match the basis"));
    }
    out
}
