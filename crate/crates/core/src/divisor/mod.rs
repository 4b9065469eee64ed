//! R-divisors with exact coefficients, integral and fractional parts,
//! and the two decompositions of `[mD]` used throughout the positivity tests.

mod integral;
mod syntax;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_numbers::{common_field, lcm_all, QuadExt};
use crate::surface::SurfaceModel;

pub use integral::ZDivisor;
pub use syntax::{DivisorSpec, TermSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// Labels are prime divisors of the surface basis.
    Prime,
    /// Labels name integral divisors with declared prime-basis expansions.
    General,
}

/// A formal sum `sum a_i D_i` with coefficients in one quadratic field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RDivisor {
    terms: BTreeMap<String, QuadExt>,
    expansions: BTreeMap<String, Vec<i64>>,
    rep: Representation,
}

/// Output of [`RDivisor::enumerate_tm`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TmEnumeration {
    pub observed: BTreeSet<ZDivisor>,
    /// Per prime coordinate, the closed interval every `T_m` coordinate lies in.
    pub bounds: Vec<(i64, i64)>,
}

impl TmEnumeration {
    pub fn within_bounds(&self, t: &ZDivisor) -> bool {
        t.coords()
            .iter()
            .zip(&self.bounds)
            .all(|(c, (lo, hi))| lo <= c && c <= hi)
    }
}

/// `m = t k + i` with `[mD] = t (kD) + [iD]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrDecomposition {
    pub k: u64,
    pub t: u64,
    pub i: u64,
}

impl RDivisor {
    /// Prime-basis divisor; repeated labels are summed and zero terms dropped.
    pub fn prime<S: Into<String>>(terms: impl IntoIterator<Item = (S, QuadExt)>) -> Result<Self> {
        let mut map: BTreeMap<String, QuadExt> = BTreeMap::new();
        for (label, c) in terms {
            let label = label.into();
            let entry = map.entry(label).or_insert_with(QuadExt::zero);
            *entry = entry.try_add(&c)?;
        }
        map.retain(|_, c| !c.is_zero());
        let d = RDivisor {
            terms: map,
            expansions: BTreeMap::new(),
            rep: Representation::Prime,
        };
        d.field()?;
        Ok(d)
    }

    /// Prime-basis divisor from a coordinate vector.
    pub fn from_coords(s: &SurfaceModel, coords: &[QuadExt]) -> Result<Self> {
        if coords.len() != s.rank() {
            return Err(Error::InvalidInput(format!(
                "expected {} coordinates, got {}",
                s.rank(),
                coords.len()
            )));
        }
        Self::prime(s.basis().iter().cloned().zip(coords.iter().cloned()))
    }

    pub fn from_integral(s: &SurfaceModel, z: &ZDivisor) -> Result<Self> {
        let coords: Vec<QuadExt> = z.coords().iter().map(|&c| QuadExt::from_int(c)).collect();
        Self::from_coords(s, &coords)
    }

    /// Divisor in general representation: `(label, coefficient, prime expansion)`.
    pub fn general<S: Into<String>>(
        components: impl IntoIterator<Item = (S, QuadExt, Vec<i64>)>,
    ) -> Result<Self> {
        let mut terms: BTreeMap<String, QuadExt> = BTreeMap::new();
        let mut expansions = BTreeMap::new();
        for (label, c, exp) in components {
            let label = label.into();
            if let Some(prev) = expansions.get(&label) {
                if *prev != exp {
                    return Err(Error::Representation(format!(
                        "component {label} declared with two different expansions"
                    )));
                }
            }
            let entry = terms.entry(label.clone()).or_insert_with(QuadExt::zero);
            *entry = entry.try_add(&c)?;
            expansions.insert(label, exp);
        }
        terms.retain(|_, c| !c.is_zero());
        expansions.retain(|l, _| terms.contains_key(l));
        let d = RDivisor {
            terms,
            expansions,
            rep: Representation::General,
        };
        d.field()?;
        Ok(d)
    }

    /// Parses the inline syntax `3/2*C0 + 3*f`, `(1+sqrt(2))*C0 - f`, `0`.
    pub fn parse(text: &str) -> Result<Self> {
        syntax::parse_inline(text)
    }

    pub fn zero() -> Self {
        RDivisor {
            terms: BTreeMap::new(),
            expansions: BTreeMap::new(),
            rep: Representation::Prime,
        }
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn terms(&self) -> &BTreeMap<String, QuadExt> {
        &self.terms
    }

    pub fn expansion(&self, label: &str) -> Option<&[i64]> {
        self.expansions.get(label).map(|v| v.as_slice())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common radicand of the coefficients, 0 if all rational.
    pub fn field(&self) -> Result<u64> {
        common_field(self.terms.values())
    }

    pub fn is_rational(&self) -> bool {
        self.terms.values().all(|c| c.is_rational())
    }

    /// Prime-basis coordinates on `s`; general components are expanded.
    pub fn coords(&self, s: &SurfaceModel) -> Result<Vec<QuadExt>> {
        let mut out = vec![QuadExt::zero(); s.rank()];
        for (label, c) in &self.terms {
            match self.rep {
                Representation::Prime => {
                    let k = s.label_index(label).ok_or_else(|| {
                        Error::InvalidInput(format!("label {label} is not a prime divisor of {}", s.name()))
                    })?;
                    out[k] = out[k].try_add(c)?;
                }
                Representation::General => {
                    let exp = &self.expansions[label];
                    if exp.len() != s.rank() {
                        return Err(Error::Representation(format!(
                            "expansion of {label} has {} entries, surface rank is {}",
                            exp.len(),
                            s.rank()
                        )));
                    }
                    for (k, e) in exp.iter().enumerate() {
                        out[k] = out[k].try_add(&c.scale_int(*e))?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// The same class rewritten in the prime basis.
    pub fn expand(&self, s: &SurfaceModel) -> Result<RDivisor> {
        Self::from_coords(s, &self.coords(s)?)
    }

    /// `q D` for a scalar `q`.
    pub fn scale(&self, q: &QuadExt) -> Result<RDivisor> {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.try_mul(q)?;
        }
        out.terms.retain(|_, c| !c.is_zero());
        out.expansions.retain(|l, _| out.terms.contains_key(l));
        Ok(out)
    }

    pub fn scale_int(&self, m: i64) -> RDivisor {
        self.scale(&QuadExt::from_int(m)).expect("integer scaling stays in the field")
    }

    /// Sum of two prime-basis divisors.
    pub fn try_add(&self, other: &RDivisor) -> Result<RDivisor> {
        if self.rep != Representation::Prime || other.rep != Representation::Prime {
            return Err(Error::Representation("addition needs prime representations".into()));
        }
        Self::prime(self.terms.iter().chain(other.terms.iter()).map(|(l, c)| (l.clone(), c.clone())))
    }

    fn require_prime(&self, op: &str) -> Result<()> {
        if self.rep == Representation::General {
            return Err(Error::Representation(format!(
                "{op} is defined on prime representations; expand first or use round_decompose"
            )));
        }
        Ok(())
    }

    /// `[D] = sum [a_i] D_i`.
    pub fn integral_part(&self, s: &SurfaceModel) -> Result<ZDivisor> {
        self.require_prime("integral_part")?;
        Ok(floor_coords(&self.coords(s)?))
    }

    /// `{D} = D - [D]`.
    pub fn fractional_part(&self, s: &SurfaceModel) -> Result<RDivisor> {
        self.require_prime("fractional_part")?;
        let fr: Vec<QuadExt> = self.coords(s)?.iter().map(|c| c.frac()).collect();
        Self::from_coords(s, &fr)
    }

    /// `[mD]` for a prime-basis divisor given by coordinates.
    pub fn round_multiple(coords: &[QuadExt], m: i64) -> ZDivisor {
        ZDivisor::new(coords.iter().map(|c| c.scale_int(m).floor_i64()).collect())
    }

    /// Splits `[mD]` as `sum [m a_i] D_i + T_m` with `T_m = [sum {m a_i} D_i]`.
    pub fn round_decompose(&self, s: &SurfaceModel, m: u64) -> Result<(ZDivisor, ZDivisor)> {
        let m_i = i64::try_from(m).map_err(|_| Error::InvalidInput("m too large".into()))?;
        if m == 0 {
            return Err(Error::InvalidInput("round_decompose needs m >= 1".into()));
        }
        let rank = s.rank();
        let mut sum = vec![0i64; rank];
        let mut frac = vec![QuadExt::zero(); rank];
        for (label, c) in &self.terms {
            let exp: Vec<i64> = match self.rep {
                Representation::General => self.expansions[label].clone(),
                Representation::Prime => {
                    let k = s.label_index(label).ok_or_else(|| {
                        Error::InvalidInput(format!("label {label} is not a prime divisor of {}", s.name()))
                    })?;
                    ZDivisor::unit(rank, k).coords().to_vec()
                }
            };
            if exp.len() != rank {
                return Err(Error::Representation(format!("expansion of {label} has wrong length")));
            }
            let mc = c.scale_int(m_i);
            let fl = mc.floor_i64();
            let fr = mc.frac();
            for k in 0..rank {
                sum[k] += fl * exp[k];
                frac[k] = frac[k].try_add(&fr.scale_int(exp[k]))?;
            }
        }
        let sum = ZDivisor::new(sum);
        let t = floor_coords(&frac);
        let direct = Self::round_multiple(&self.coords(s)?, m_i);
        if &sum + &t != direct {
            return Err(Error::Internal(format!(
                "round_decompose identity failed at m = {m}: {sum} + {t} != {direct}"
            )));
        }
        Ok((sum, t))
    }

    /// Observed `{T_m : 1 <= m <= m_max}` and the a-priori coordinate box containing every `T_m`.
    pub fn enumerate_tm(&self, s: &SurfaceModel, m_max: u64) -> Result<TmEnumeration> {
        let rank = s.rank();
        let mut pos = vec![0i64; rank];
        let mut neg = vec![0i64; rank];
        for label in self.terms.keys() {
            let exp: Vec<i64> = match self.rep {
                Representation::General => self.expansions[label].clone(),
                Representation::Prime => match s.label_index(label) {
                    Some(k) => ZDivisor::unit(rank, k).coords().to_vec(),
                    None => {
                        return Err(Error::InvalidInput(format!("label {label} not on {}", s.name())))
                    }
                },
            };
            for k in 0..rank {
                pos[k] += exp[k].max(0);
                neg[k] += (-exp[k]).max(0);
            }
        }
        // sum {m a_i} E_i lies in (-neg, pos), so its floor lies in [-neg, max(pos - 1, 0)].
        let bounds = (0..rank).map(|k| (-neg[k], (pos[k] - 1).max(0))).collect();
        let mut observed = BTreeSet::new();
        for m in 1..=m_max {
            observed.insert(self.round_decompose(s, m)?.1);
        }
        Ok(TmEnumeration { observed, bounds })
    }

    /// Least `k >= 1` with `kD` integral, for a rational divisor.
    pub fn denominator_lcm(&self) -> Result<u64> {
        let dens: Vec<BigInt> = self
            .terms
            .values()
            .map(|c| {
                c.denominator()
                    .ok_or_else(|| Error::InvalidInput("divisor has irrational coefficients".into()))
            })
            .collect::<Result<_>>()?;
        lcm_all(&dens)
            .to_u64()
            .ok_or_else(|| Error::InvalidInput("denominator too large".into()))
    }

    /// `m = t k + i` and the verified identity `[mD] = t (kD) + [iD]`.
    pub fn lemma_dr_decompose(&self, s: &SurfaceModel, m: u64) -> Result<DrDecomposition> {
        self.require_prime("lemma_dr_decompose")?;
        let k = self.denominator_lcm()?;
        let (t, i) = (m / k, m % k);
        let coords = self.coords(s)?;
        let kd = Self::round_multiple(&coords, k as i64);
        let lhs = Self::round_multiple(&coords, m as i64);
        let rhs = &kd.scale(t as i64) + &Self::round_multiple(&coords, i as i64);
        if lhs != rhs {
            return Err(Error::Internal(format!(
                "[mD] = t kD + [iD] failed for m = {m}: {lhs} != {rhs}"
            )));
        }
        Ok(DrDecomposition { k, t, i })
    }

    /// Renders against the prime basis, or with component labels in general form.
    pub fn to_inline(&self) -> String {
        syntax::format_inline(self)
    }
}

/// Coordinatewise floor.
pub fn floor_coords(coords: &[QuadExt]) -> ZDivisor {
    ZDivisor::new(coords.iter().map(|c| c.floor_i64()).collect())
}

impl fmt::Display for RDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_inline())
    }
}

impl Serialize for RDivisor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DivisorSpec::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RDivisor {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = DivisorSpec::deserialize(deserializer)?;
        spec.build().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(s: &str) -> QuadExt {
        s.parse().unwrap()
    }

    fn f2() -> SurfaceModel {
        SurfaceModel::hirzebruch(2).unwrap()
    }

    fn worked_general() -> RDivisor {
        RDivisor::general([("A", q("1/2"), vec![1, 1]), ("B", q("1/2"), vec![1, 2])]).unwrap()
    }

    #[test]
    fn integral_and_fractional_parts() {
        let s = f2();
        let d = RDivisor::parse("3/2*C0 + 3*f").unwrap();
        assert_eq!(d.integral_part(&s).unwrap(), ZDivisor::new(vec![1, 3]));
        let d = RDivisor::parse("-1/2*C0").unwrap();
        assert_eq!(d.integral_part(&s).unwrap(), ZDivisor::new(vec![-1, 0]));
        assert_eq!(d.fractional_part(&s).unwrap(), RDivisor::parse("1/2*C0").unwrap());
        let d = RDivisor::parse("sqrt(2)*C0 + sqrt(2)*f").unwrap();
        assert_eq!(d.scale_int(10).integral_part(&s).unwrap(), ZDivisor::new(vec![14, 14]));
        assert!(matches!(worked_general().integral_part(&s), Err(Error::Representation(_))));
    }

    #[test]
    fn worked_round_decomposition() {
        let s = f2();
        let d = worked_general();
        let (sum, t) = d.round_decompose(&s, 1).unwrap();
        assert_eq!(sum, ZDivisor::zero(2));
        assert_eq!(t, ZDivisor::new(vec![1, 1]));
        let (sum, t) = d.round_decompose(&s, 2).unwrap();
        assert_eq!(sum, ZDivisor::new(vec![2, 3]));
        assert_eq!(t, ZDivisor::zero(2));
        let prime = RDivisor::parse("7/3*C0 + 5/4*f").unwrap();
        for m in 1..30 {
            assert!(prime.round_decompose(&s, m).unwrap().1.is_zero());
        }
    }

    #[test]
    fn worked_tm_set() {
        let s = f2();
        let e = worked_general().enumerate_tm(&s, 12).unwrap();
        let expected: BTreeSet<_> = [ZDivisor::zero(2), ZDivisor::new(vec![1, 1])].into_iter().collect();
        assert_eq!(e.observed, expected);
        assert_eq!(e.bounds, vec![(0, 1), (0, 2)]);
        assert!(e.observed.iter().all(|t| e.within_bounds(t)));
    }

    #[test]
    fn lemma_dr_examples() {
        let s = f2();
        let d = RDivisor::parse("3/2*C0").unwrap();
        assert_eq!(d.lemma_dr_decompose(&s, 5).unwrap(), DrDecomposition { k: 2, t: 2, i: 1 });
        let d = RDivisor::parse("1/3*C0 + 1/2*f").unwrap();
        assert_eq!(d.lemma_dr_decompose(&s, 7).unwrap(), DrDecomposition { k: 6, t: 1, i: 1 });
        let d = RDivisor::parse("2*C0 - f").unwrap();
        assert_eq!(d.lemma_dr_decompose(&s, 9).unwrap(), DrDecomposition { k: 1, t: 9, i: 0 });
        assert!(RDivisor::parse("sqrt(2)*f").unwrap().lemma_dr_decompose(&s, 3).is_err());
    }

    #[test]
    fn mixed_fields_rejected() {
        assert!(matches!(RDivisor::parse("sqrt(2)*C0 + sqrt(3)*f"), Err(Error::MixedField(..))));
    }

    #[test]
    fn multiples_converge_in_coordinates() {
        let s = f2();
        let d = RDivisor::parse("sqrt(2)*C0 + 5/7*f").unwrap();
        let coords = d.coords(&s).unwrap();
        let eps = BigRational::new(1.into(), 50.into());
        // |[mD]_i / m - a_i| < 1/m, so every m > 50 works.
        for m in 51..200i64 {
            let z = RDivisor::round_multiple(&coords, m);
            for (zi, ai) in z.coords().iter().zip(&coords) {
                let diff = ai.try_sub(&QuadExt::from_ratio(*zi, m)).unwrap();
                assert!(diff.abs() < QuadExt::rational(eps.clone()));
            }
        }
    }
}
