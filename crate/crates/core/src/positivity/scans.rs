//! Bounded scans over `m <= m_max`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::cones::{big_coords, effective_facets, is_effective_class, nef_coords, pair_coords};
use super::sequence::{kodaira_least, Context};
use crate::divisor::{RDivisor, ZDivisor};
use crate::error::{Error, Result};
use crate::exact_numbers::QuadExt;
use crate::surface::{Predicate, SurfaceModel};

/// No horizon search: these operations look at `[0, m_max]` only.
const NO_HORIZON: u64 = 0;

fn context<'a>(s: &'a SurfaceModel, d: &RDivisor, m_max: u64) -> Result<Context<'a>> {
    Context::new(s, d, m_max, NO_HORIZON)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VeryAmpleMultiples {
    pub first_m: Option<u64>,
    pub all_from: Option<u64>,
}

pub fn very_ample_multiples(s: &SurfaceModel, d: &RDivisor, m_max: u64) -> Result<VeryAmpleMultiples> {
    let series = context(s, d, m_max)?.oracle(Predicate::VeryAmple, &ZDivisor::zero(s.rank()))?;
    Ok(VeryAmpleMultiples {
        first_m: series.scan_first(),
        all_from: series.scan_from(),
    })
}

/// Least `m2 <= m_max` with `G + [mD]` globally generated on `[m2, m_max]`.
pub fn glob_gen_twist_test(s: &SurfaceModel, d: &RDivisor, g: &ZDivisor, m_max: u64) -> Result<Option<u64>> {
    Ok(context(s, d, m_max)?.oracle(Predicate::GloballyGenerated, g)?.scan_from())
}

/// Least `m1 <= m_max` with `h1 = h2 = 0` for `G + [mD]` on `[m1, m_max]`.
pub fn vanishing_test(s: &SurfaceModel, d: &RDivisor, g: &ZDivisor, m_max: u64) -> Result<Option<u64>> {
    Ok(context(s, d, m_max)?.oracle(Predicate::Vanishing, g)?.scan_from())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiGrowth {
    pub values: Vec<(u64, i64)>,
    /// `2 chi([mD]) / m^2` at the largest positive `m`.
    pub leading: Option<QuadExt>,
}

pub fn chi_growth(s: &SurfaceModel, d: &RDivisor, m_list: &[u64]) -> Result<ChiGrowth> {
    let coords = d.coords(s)?;
    let values: Vec<(u64, i64)> = m_list
        .iter()
        .map(|&m| (m, s.chi(&RDivisor::round_multiple(&coords, m as i64))))
        .collect();
    let leading = values
        .iter()
        .filter(|(m, _)| *m > 0)
        .max_by_key(|(m, _)| *m)
        .map(|&(m, chi)| QuadExt::rational(BigRational::new(BigInt::from(2 * chi), BigInt::from(m as i128 * m as i128))));
    Ok(ChiGrowth { values, leading })
}

/// `(m, h0([mD]))` for each `m`.
pub fn h0_growth(s: &SurfaceModel, d: &RDivisor, m_list: &[u64]) -> Result<Vec<(u64, u64)>> {
    let coords = d.coords(s)?;
    m_list
        .iter()
        .map(|&m| Ok((m, s.h0(&RDivisor::round_multiple(&coords, m as i64))?)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Semigroup {
    /// `{m <= m_max : h0([mD]) > 0}`.
    pub members: Vec<u64>,
    /// Whether `a + b` is a member whenever `a`, `b` are and `a + b <= m_max`.
    pub closed: bool,
}

pub fn semigroup(s: &SurfaceModel, d: &RDivisor, m_max: u64) -> Result<Semigroup> {
    let series = context(s, d, m_max)?.effective(&ZDivisor::zero(s.rank()))?;
    let flags = &series.values;
    let members: Vec<u64> = (0..=m_max).filter(|&m| flags[m as usize]).collect();
    let closed = members.iter().all(|&a| {
        members
            .iter()
            .take_while(|&&b| a + b <= m_max)
            .all(|&b| flags[(a + b) as usize])
    });
    Ok(Semigroup { members, closed })
}

fn require_big(s: &SurfaceModel, coords: &[QuadExt]) -> Result<()> {
    if !big_coords(s, coords)?.holds {
        return Err(Error::InvalidInput("divisor is not big".into()));
    }
    Ok(())
}

/// Least `m <= m_max` in `N(X, D)` with `h0([mD] - F) > 0`, persisting on `N(X, D)` up to `m_max`.
pub fn kodaira_check(s: &SurfaceModel, d: &RDivisor, f: &ZDivisor, m_max: u64) -> Result<Option<u64>> {
    let ctx = context(s, d, m_max)?;
    require_big(s, &ctx.coords)?;
    let fq: Vec<QuadExt> = f.coords().iter().map(|&c| QuadExt::from_int(c)).collect();
    if f.rank() != s.rank() || !is_effective_class(s, &fq)? {
        return Err(Error::InvalidInput("F is not effective".into()));
    }
    let (both, implies) = ctx.kodaira(f)?;
    let n = m_max as usize + 1;
    Ok(kodaira_least(&both.values[..n], &implies.values[..n]))
}

/// Outcome of the quadratic-growth test for `h0([mD])`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthCheck {
    /// `h0([M D]) / (2 M^2)` with `M = m_max`.
    pub c_estimate: QuadExt,
    pub pass: bool,
    pub h0_top: u64,
    /// `h0([floor(M/4) D])`; quadratic growth needs roughly a factor 16 over it.
    pub h0_quarter: u64,
    /// `h0([M D]) / M^2`.
    pub leading: QuadExt,
    /// `D^2 / 2` when `D` is nef.
    pub expected: Option<QuadExt>,
}

pub(crate) fn growth_from_h0(h: &[u64], m_max: u64) -> (QuadExt, bool) {
    let top = h[m_max as usize];
    let quarter = h[(m_max / 4) as usize];
    let c = BigRational::new(BigInt::from(top), BigInt::from(2 * m_max as u128 * m_max as u128));
    let lower_ok = (m_max.div_ceil(2)..=m_max).all(|m| {
        let hm = h[m as usize];
        hm == 0 || BigRational::from_integer(hm.into()) >= &c * BigInt::from(m as u128 * m as u128)
    });
    let pass = top > 0 && lower_ok && top > 8 * quarter;
    (QuadExt::rational(c), pass)
}

pub fn big_growth_check(s: &SurfaceModel, d: &RDivisor, m_max: u64) -> Result<GrowthCheck> {
    growth_coords(s, &d.coords(s)?, m_max)
}

pub(crate) fn growth_coords(s: &SurfaceModel, coords: &[QuadExt], m_max: u64) -> Result<GrowthCheck> {
    if m_max < 4 {
        return Err(Error::InvalidInput("m_max must be at least 4".into()));
    }
    let h: Vec<u64> = (0..=m_max)
        .map(|m| s.h0(&RDivisor::round_multiple(coords, m as i64)))
        .collect::<Result<_>>()?;
    let (c_estimate, pass) = growth_from_h0(&h, m_max);
    let top = h[m_max as usize];
    let expected = if nef_coords(s, coords)?.holds {
        Some(pair_coords(s, coords, coords)?.scale_rational(&BigRational::new(1.into(), 2.into())))
    } else {
        None
    };
    Ok(GrowthCheck {
        c_estimate,
        pass,
        h0_top: top,
        h0_quarter: h[(m_max / 4) as usize],
        leading: QuadExt::rational(BigRational::new(top.into(), BigInt::from(m_max as u128 * m_max as u128))),
        expected,
    })
}

/// Least `m0 <= m_max` with `[mD]` big for every `m` in `[m0, m_max]`.
pub fn claim_boh_check(s: &SurfaceModel, d: &RDivisor, m_max: u64) -> Result<Option<u64>> {
    let ctx = context(s, d, m_max)?;
    require_big(s, &ctx.coords)?;
    Ok(ctx.big_integral(&effective_facets(s))?.scan_from())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> RDivisor {
        RDivisor::parse(s).unwrap()
    }

    fn f2() -> SurfaceModel {
        SurfaceModel::hirzebruch(2).unwrap()
    }

    #[test]
    fn very_ample_examples() {
        let s = f2();
        let v = very_ample_multiples(&s, &d("3/2*C0 + 3*f"), 200).unwrap();
        assert_eq!(v.first_m, Some(1));
        assert_eq!(v.all_from, None);
        let v = very_ample_multiples(&s, &d("C0 + 3*f"), 200).unwrap();
        assert_eq!(v, VeryAmpleMultiples { first_m: Some(1), all_from: Some(1) });
        assert_eq!(very_ample_multiples(&s, &d("f"), 200).unwrap().first_m, None);
    }

    #[test]
    fn twist_scans() {
        let s = f2();
        assert_eq!(glob_gen_twist_test(&s, &d("C0 + 3*f"), &ZDivisor::new(vec![-1, 0]), 200).unwrap(), Some(1));
        assert_eq!(glob_gen_twist_test(&s, &d("f"), &ZDivisor::zero(2), 200).unwrap(), Some(0));
        assert_eq!(glob_gen_twist_test(&s, &d("f"), &ZDivisor::new(vec![-1, 0]), 200).unwrap(), None);
        assert_eq!(vanishing_test(&s, &d("C0 + 3*f"), &ZDivisor::zero(2), 200).unwrap(), Some(0));
        assert_eq!(vanishing_test(&s, &d("3/2*C0 + 3*f"), &ZDivisor::new(vec![0, -4]), 200).unwrap(), None);
        // K - [mD] at m = 1 has h2 = h0(0) = 1.
        let k_minus = s.canonical_class() - &ZDivisor::new(vec![1, 3]);
        assert_eq!(s.cohomology(&(&k_minus + &ZDivisor::new(vec![1, 3]))).unwrap().h2, 1);
    }

    #[test]
    fn chi_examples() {
        let s = f2();
        let g = chi_growth(&s, &d("C0 + 3*f"), &[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(g.values.iter().map(|v| v.1).collect::<Vec<_>>(), vec![6, 15, 28, 45, 66]);
        let g = chi_growth(&s, &RDivisor::zero(), &[0, 1, 7]).unwrap();
        assert!(g.values.iter().all(|v| v.1 == 1));
        let g = chi_growth(&s, &d("sqrt(2)*C0 + 3*sqrt(2)*f"), &[10]).unwrap();
        assert_eq!(g.values, vec![(10, s.chi(&ZDivisor::new(vec![14, 42])))]);
        assert_eq!(g.values[0].1, 435);
    }

    #[test]
    fn semigroup_examples() {
        let s = f2();
        let g = semigroup(&s, &d("C0 - 1/2*f"), 10).unwrap();
        assert_eq!(g.members, vec![0]);
        assert!(g.closed);
        let g = semigroup(&s, &d("3/2*C0 + 3*f"), 30).unwrap();
        assert_eq!(g.members, (0..=30).collect::<Vec<_>>());
        assert_eq!(semigroup(&s, &RDivisor::zero(), 5).unwrap().members.len(), 6);
    }

    #[test]
    fn kodaira_examples() {
        let s = f2();
        let dd = d("C0 + 3*f");
        assert_eq!(kodaira_check(&s, &dd, &ZDivisor::new(vec![1, 0]), 50).unwrap(), Some(1));
        assert_eq!(kodaira_check(&s, &dd, &ZDivisor::zero(2), 50).unwrap(), Some(0));
        let irr = d("sqrt(2)*C0 + 3*sqrt(2)*f");
        assert_eq!(kodaira_check(&s, &irr, &ZDivisor::new(vec![1, 1]), 50).unwrap(), Some(1));
        assert!(kodaira_check(&s, &d("f"), &ZDivisor::zero(2), 50).is_err());
        assert!(kodaira_check(&s, &dd, &ZDivisor::new(vec![-1, 0]), 50).is_err());
    }

    #[test]
    fn growth_examples() {
        let s = f2();
        let g = big_growth_check(&s, &d("C0 + 3*f"), 100).unwrap();
        assert!(g.pass);
        assert_eq!(g.h0_top, 101 * 201);
        assert_eq!(g.expected, Some(QuadExt::from_int(2)));
        assert!(!big_growth_check(&s, &d("f"), 100).unwrap().pass);
        assert!(!big_growth_check(&s, &RDivisor::zero(), 100).unwrap().pass);
        for m in 1..=100 {
            assert_eq!(h0_growth(&s, &d("C0 + 3*f"), &[m]).unwrap()[0].1, (m + 1) * (2 * m + 1));
        }
    }

    #[test]
    fn claim_boh_examples() {
        let s = f2();
        assert_eq!(claim_boh_check(&s, &d("sqrt(2)*C0 + 3*sqrt(2)*f"), 100).unwrap(), Some(1));
        assert_eq!(claim_boh_check(&s, &d("1/2*C0 + 1/2*f"), 100).unwrap(), Some(2));
        assert_eq!(claim_boh_check(&s, &d("C0 + 3*f"), 100).unwrap(), Some(1));
    }
}
