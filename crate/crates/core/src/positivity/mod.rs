//! Executable ampleness, nefness and bigness criteria.

mod cones;
mod report;
mod scans;
mod sequence;

pub use cones::{
    effective_facets, intersect, is_ample_cone, is_big, is_effective_class, is_nef, nakai_test, neighborhood_test,
    pair_coords, pair_curve, ratio_bound, seshadri_bound, BigCertificate, BigCheck, ConeCheck, NakaiCheck,
};
pub use report::{
    check, default_twists, kodaira_divisors, vanishing_twists, Condition, EvalOptions, Fault, PositivityReport, Run,
    Verdict, Witness, AMPLE_RATIONAL, AMPLE_REAL, BIG,
};
pub use scans::{
    big_growth_check, chi_growth, claim_boh_check, glob_gen_twist_test, h0_growth, kodaira_check, semigroup,
    vanishing_test, very_ample_multiples, ChiGrowth, GrowthCheck, Semigroup, VeryAmpleMultiples,
};
pub use sequence::{ExactRun, Window};
