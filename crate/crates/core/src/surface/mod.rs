//! Surfaces with explicit Picard lattice, cones and section-count oracles.

mod file;
mod signature;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::divisor::ZDivisor;
use crate::error::{Error, Result};

pub use file::{H0Entry, OracleSpec, SurfaceSpec};

/// A curve class with the multiplicity used in Seshadri-type ratios.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveClass {
    pub label: String,
    #[serde(rename = "class")]
    pub class_coords: Vec<i64>,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

impl CurveClass {
    pub fn new(label: impl Into<String>, class_coords: Vec<i64>, multiplicity: u32) -> Self {
        CurveClass {
            label: label.into(),
            class_coords,
            multiplicity,
        }
    }

    pub fn class(&self) -> ZDivisor {
        ZDivisor::new(self.class_coords.clone())
    }
}

/// Source of `h0` and of the very-ample / globally-generated predicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectionOracle {
    Hirzebruch { e: u32 },
    ProjectivePlane,
    /// Finite `h0` lookup; the positivity predicates are unavailable.
    Table(BTreeMap<ZDivisor, u64>),
}

/// Integral-divisor predicates answered by the surface oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    VeryAmple,
    GloballyGenerated,
    /// `h0 > 0`.
    Effective,
    /// `h1 = h2 = 0`.
    Vanishing,
}

/// A predicate depends on `normal . coords` only through its clamp to `[lo - 1, hi + 1]`.
///
/// Used to bound the point after which an arithmetic progression of classes
/// stops changing the predicate's value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guard {
    pub normal: Vec<i64>,
    pub lo: i64,
    pub hi: i64,
}

impl Guard {
    fn new(normal: Vec<i64>, lo: i64, hi: i64) -> Self {
        Guard { normal, lo, hi }
    }
}

/// `(h0, h1, h2)` of a line bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cohomology {
    pub h0: u64,
    pub h1: u64,
    pub h2: u64,
}

impl Cohomology {
    pub fn vanishes_above_zero(&self) -> bool {
        self.h1 == 0 && self.h2 == 0
    }
}

/// A smooth projective surface given by finite numerical data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceModel {
    name: String,
    basis: Vec<String>,
    matrix: Vec<Vec<i64>>,
    mori: Vec<CurveClass>,
    effective: Vec<ZDivisor>,
    canonical: ZDivisor,
    chi: i64,
    catalog: Vec<CurveClass>,
    ample: ZDivisor,
    oracle: SectionOracle,
}

impl SurfaceModel {
    /// The Hirzebruch surface `F_e` in the basis `[C0, f]`.
    pub fn hirzebruch(e: i64) -> Result<Self> {
        if e < 0 {
            return Err(Error::InvalidInput(format!("hirzebruch needs e >= 0, got {e}")));
        }
        let e_u = u32::try_from(e).map_err(|_| Error::InvalidInput(format!("e = {e} too large")))?;
        let mori = vec![
            CurveClass::new("C0", vec![1, 0], 1),
            CurveClass::new("f", vec![0, 1], 1),
        ];
        Ok(SurfaceModel {
            name: format!("hirzebruch:{e}"),
            basis: vec!["C0".into(), "f".into()],
            matrix: vec![vec![-e, 1], vec![1, 0]],
            catalog: mori.clone(),
            mori,
            effective: vec![ZDivisor::new(vec![1, 0]), ZDivisor::new(vec![0, 1])],
            canonical: ZDivisor::new(vec![-2, -(e + 2)]),
            chi: 1,
            ample: ZDivisor::new(vec![1, e + 1]),
            oracle: SectionOracle::Hirzebruch { e: e_u },
        })
    }

    /// The projective plane with basis `[L]`.
    pub fn projective_plane() -> Self {
        let mori = vec![CurveClass::new("L", vec![1], 1)];
        SurfaceModel {
            name: "p2".into(),
            basis: vec!["L".into()],
            matrix: vec![vec![1]],
            catalog: mori.clone(),
            mori,
            effective: vec![ZDivisor::new(vec![1])],
            canonical: ZDivisor::new(vec![-3]),
            chi: 1,
            ample: ZDivisor::new(vec![1]),
            oracle: SectionOracle::ProjectivePlane,
        }
    }

    /// Resolves `hirzebruch:<e>` or `p2`.
    pub fn builtin(id: &str) -> Result<Self> {
        let id = id.trim();
        if id.eq_ignore_ascii_case("p2") {
            return Ok(Self::projective_plane());
        }
        if let Some(rest) = id.strip_prefix("hirzebruch:") {
            let e: i64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::parse("surface", format!("bad Hirzebruch index in {id:?}")))?;
            return Self::hirzebruch(e);
        }
        Err(Error::parse(
            "surface",
            format!("unknown builtin surface {id:?}; expected hirzebruch:<e> or p2"),
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == label)
    }

    pub fn intersection_matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn mori_generators(&self) -> &[CurveClass] {
        &self.mori
    }

    pub fn effective_generators(&self) -> &[ZDivisor] {
        &self.effective
    }

    pub fn canonical_class(&self) -> &ZDivisor {
        &self.canonical
    }

    pub fn chi_structure(&self) -> i64 {
        self.chi
    }

    /// Curves entering the Seshadri ratio. Defaults to the Mori generators.
    pub fn curve_catalog(&self) -> &[CurveClass] {
        &self.catalog
    }

    /// A fixed ample class used as the reference `H`.
    pub fn ample_reference(&self) -> &ZDivisor {
        &self.ample
    }

    pub fn oracle(&self) -> &SectionOracle {
        &self.oracle
    }

    /// Hirzebruch index if this surface is `F_e`.
    pub fn hirzebruch_index(&self) -> Option<u32> {
        match self.oracle {
            SectionOracle::Hirzebruch { e } => Some(e),
            _ => None,
        }
    }

    /// Copy with a replaced curve catalog.
    pub fn with_curve_catalog(&self, catalog: Vec<CurveClass>) -> Self {
        let mut s = self.clone();
        s.catalog = catalog;
        s
    }

    /// Intersection number of two coordinate vectors.
    pub fn pair_coords(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut acc = 0i64;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                acc += x[i] * m * y[j];
            }
        }
        acc
    }

    pub fn pair(&self, x: &ZDivisor, y: &ZDivisor) -> i64 {
        self.pair_coords(x.coords(), y.coords())
    }

    /// Row of intersection numbers `(B_k . C)` over the basis.
    pub fn pairing_row(&self, curve: &[i64]) -> Vec<i64> {
        (0..self.rank())
            .map(|k| (0..self.rank()).map(|j| self.matrix[k][j] * curve[j]).sum())
            .collect()
    }

    /// `chi(O_X(Z))` by Riemann-Roch.
    pub fn chi(&self, z: &ZDivisor) -> i64 {
        let z2 = self.pair(z, z);
        let zk = self.pair(z, &self.canonical);
        self.chi + (z2 - zk) / 2
    }

    pub fn h0(&self, z: &ZDivisor) -> Result<u64> {
        self.check_rank(z)?;
        match &self.oracle {
            SectionOracle::Hirzebruch { e } => Ok(hirzebruch_h0(*e, z.coords()[0], z.coords()[1])),
            SectionOracle::ProjectivePlane => Ok(p2_h0(z.coords()[0])),
            SectionOracle::Table(t) => t.get(z).copied().ok_or_else(|| {
                Error::OracleUnavailable(format!(
                    "no h0 entry for {} on {}",
                    z.format_with(&self.basis),
                    self.name
                ))
            }),
        }
    }

    pub fn very_ample(&self, z: &ZDivisor) -> Result<bool> {
        self.check_rank(z)?;
        let c = z.coords();
        match self.oracle {
            SectionOracle::Hirzebruch { e } => Ok(c[0] >= 1 && c[1] > c[0] * e as i64),
            SectionOracle::ProjectivePlane => Ok(c[0] >= 1),
            SectionOracle::Table(_) => Err(self.no_predicate("very_ample")),
        }
    }

    pub fn globally_generated(&self, z: &ZDivisor) -> Result<bool> {
        self.check_rank(z)?;
        let c = z.coords();
        match self.oracle {
            SectionOracle::Hirzebruch { e } => Ok(c[0] >= 0 && c[1] >= c[0] * e as i64),
            SectionOracle::ProjectivePlane => Ok(c[0] >= 0),
            SectionOracle::Table(_) => Err(self.no_predicate("globally_generated")),
        }
    }

    /// `h0`, `h2 = h0(K - Z)` and `h1 = h0 + h2 - chi`.
    pub fn cohomology(&self, z: &ZDivisor) -> Result<Cohomology> {
        let h0 = self.h0(z)?;
        let h2 = self.h0(&(&self.canonical - z))?;
        let h1 = h0 as i128 + h2 as i128 - self.chi(z) as i128;
        if h1 < 0 {
            return Err(Error::Internal(format!(
                "negative h1 for {} on {}: oracle inconsistent with Riemann-Roch",
                z.format_with(&self.basis),
                self.name
            )));
        }
        Ok(Cohomology {
            h0,
            h1: h1 as u64,
            h2,
        })
    }

    pub fn evaluate(&self, pred: Predicate, z: &ZDivisor) -> Result<bool> {
        match pred {
            Predicate::VeryAmple => self.very_ample(z),
            Predicate::GloballyGenerated => self.globally_generated(z),
            Predicate::Effective => Ok(self.h0(z)? > 0),
            Predicate::Vanishing => Ok(self.cohomology(z)?.vanishes_above_zero()),
        }
    }

    /// Guards for an oracle predicate; `None` when the oracle gives no closed form.
    pub fn guards(&self, pred: Predicate) -> Option<Vec<Guard>> {
        match self.oracle {
            SectionOracle::Hirzebruch { e } => {
                let e = e as i64;
                let x = vec![1, 0];
                let y = vec![-e, 1];
                let b = vec![0, 1];
                Some(match pred {
                    Predicate::VeryAmple => vec![Guard::new(x, 0, 1), Guard::new(y, 0, 1)],
                    Predicate::GloballyGenerated => {
                        vec![Guard::new(x, -1, 0), Guard::new(y, -1, 0)]
                    }
                    Predicate::Effective => vec![Guard::new(x, -1, 0), Guard::new(b, -1, 0)],
                    Predicate::Vanishing => vec![Guard::new(x, -3, 0), Guard::new(y, -2, e)],
                })
            }
            SectionOracle::ProjectivePlane => Some(vec![match pred {
                Predicate::VeryAmple => Guard::new(vec![1], 0, 1),
                Predicate::GloballyGenerated | Predicate::Effective => Guard::new(vec![1], -1, 0),
                Predicate::Vanishing => Guard::new(vec![1], -3, -2),
            }]),
            SectionOracle::Table(_) => None,
        }
    }

    /// `(positive, negative, zero)` eigenvalue counts of the intersection form.
    pub fn signature(&self) -> (usize, usize, usize) {
        signature::signature(&self.matrix)
    }

    /// True when every Mori generator meets `z` non-negatively.
    pub fn is_nef_integral(&self, z: &ZDivisor) -> bool {
        self.mori
            .iter()
            .all(|g| self.pair_coords(z.coords(), &g.class_coords) >= 0)
    }

    fn check_rank(&self, z: &ZDivisor) -> Result<()> {
        if z.rank() != self.rank() {
            return Err(Error::InvalidInput(format!(
                "divisor has {} coordinates, surface {} has rank {}",
                z.rank(),
                self.name,
                self.rank()
            )));
        }
        Ok(())
    }

    fn no_predicate(&self, what: &str) -> Error {
        Error::OracleUnavailable(format!("{what} has no closed form on {}", self.name))
    }
}

/// `h0(a C0 + b f)` on `F_e`: `sum_{j=0..a} max(0, b - j e + 1)` in closed form.
pub fn hirzebruch_h0(e: u32, a: i64, b: i64) -> u64 {
    if a < 0 || b < 0 {
        return 0;
    }
    let (a, b, e) = (a as i128, b as i128, e as i128);
    let j = if e == 0 { a } else { a.min(b / e) };
    let total = (j + 1) * (b + 1) - e * j * (j + 1) / 2;
    total as u64
}

/// `h0(d L)` on the plane.
pub fn p2_h0(d: i64) -> u64 {
    if d < 0 {
        return 0;
    }
    let d = d as u128;
    ((d + 1) * (d + 2) / 2) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZDivisor {
        ZDivisor::new(v.to_vec())
    }

    // Direct summation, kept independent of the closed form.
    fn h0_by_sum(e: i64, a: i64, b: i64) -> u64 {
        if a < 0 {
            return 0;
        }
        (0..=a).map(|j| (b - j * e + 1).max(0) as u64).sum()
    }

    // Monomials of degree d in three variables.
    fn h0_by_monomials(d: i64) -> u64 {
        if d < 0 {
            return 0;
        }
        let mut n = 0;
        for i in 0..=d {
            for j in 0..=d - i {
                let _k = d - i - j;
                n += 1;
            }
        }
        n
    }

    #[test]
    fn hirzebruch_intersections() {
        let s = SurfaceModel::hirzebruch(2).unwrap();
        let c0 = z(&[1, 0]);
        let f = z(&[0, 1]);
        assert_eq!(s.pair(&c0, &c0), -2);
        assert_eq!(s.pair(&f, &f), 0);
        assert_eq!(s.pair(&c0, &f), 1);
        let d = z(&[1, 3]);
        assert_eq!(s.pair(&d, &c0), 1);
        assert!(s.very_ample(&d).unwrap());
        assert!(SurfaceModel::hirzebruch(0).unwrap().very_ample(&z(&[1, 1])).unwrap());
        assert!(SurfaceModel::hirzebruch(-1).is_err());
    }

    #[test]
    fn closed_form_h0_matches_sum() {
        for e in 0..6 {
            for a in -3..25 {
                for b in -3..40 {
                    assert_eq!(hirzebruch_h0(e, a, b), h0_by_sum(e as i64, a, b), "e={e} a={a} b={b}");
                }
            }
        }
        for d in -3..40 {
            assert_eq!(p2_h0(d), h0_by_monomials(d));
        }
    }

    #[test]
    fn plane_examples() {
        let p = SurfaceModel::projective_plane();
        assert_eq!(p.h0(&z(&[2])).unwrap(), 6);
        assert!(!p.very_ample(&z(&[0])).unwrap());
        assert_eq!(p.pair(p.canonical_class(), &z(&[1])), -3);
        assert_eq!(p.chi(&z(&[-1])), 0);
        assert_eq!(
            p.cohomology(&z(&[-1])).unwrap(),
            Cohomology { h0: 0, h1: 0, h2: 0 }
        );
    }

    #[test]
    fn cohomology_examples() {
        let s = SurfaceModel::hirzebruch(2).unwrap();
        let d = z(&[1, 3]);
        assert_eq!(s.pair(&d, &d), 4);
        assert_eq!(s.pair(&d, s.canonical_class()), -6);
        assert_eq!(s.cohomology(&d).unwrap(), Cohomology { h0: 6, h1: 0, h2: 0 });
        assert_eq!(s.cohomology(&z(&[0, 0])).unwrap(), Cohomology { h0: 1, h1: 0, h2: 0 });
        let k = s.canonical_class().clone();
        assert_eq!(s.h0(&k).unwrap(), 0);
    }

    #[test]
    fn riemann_roch_on_a_box() {
        for s in [
            SurfaceModel::hirzebruch(0).unwrap(),
            SurfaceModel::hirzebruch(1).unwrap(),
            SurfaceModel::hirzebruch(3).unwrap(),
        ] {
            let e = s.hirzebruch_index().unwrap() as i64;
            for a in -12..=12 {
                for b in -12..=12 {
                    let d = z(&[a, b]);
                    let c = s.cohomology(&d).unwrap();
                    let chi_closed = (a + 1) * (b - a * e + 1) + e * a * (a + 1) / 2;
                    assert_eq!(s.chi(&d), chi_closed);
                    assert_eq!(c.h0 as i64 - c.h1 as i64 + c.h2 as i64, chi_closed);
                }
            }
        }
    }

    #[test]
    fn very_ample_implies_generated_implies_sections() {
        let s = SurfaceModel::hirzebruch(3).unwrap();
        for a in -5..=8 {
            for b in -5..=30 {
                let d = z(&[a, b]);
                if s.very_ample(&d).unwrap() {
                    assert!(s.globally_generated(&d).unwrap());
                }
                if s.globally_generated(&d).unwrap() {
                    assert!(s.h0(&d).unwrap() > 0);
                }
            }
        }
    }

    #[test]
    fn builtin_ids() {
        assert_eq!(SurfaceModel::builtin("hirzebruch:4").unwrap().hirzebruch_index(), Some(4));
        assert_eq!(SurfaceModel::builtin("p2").unwrap().rank(), 1);
        assert!(SurfaceModel::builtin("hirzebruch:x").is_err());
        assert!(SurfaceModel::builtin("cubic").is_err());
    }

    #[test]
    fn hodge_index_signature() {
        for e in 0..8 {
            assert_eq!(SurfaceModel::hirzebruch(e).unwrap().signature(), (1, 1, 0));
        }
        assert_eq!(SurfaceModel::projective_plane().signature(), (1, 0, 0));
    }

    #[test]
    fn ample_reference_is_ample() {
        for s in [SurfaceModel::hirzebruch(2).unwrap(), SurfaceModel::projective_plane()] {
            let h = s.ample_reference();
            assert!(s.mori_generators().iter().all(|g| s.pair_coords(h.coords(), &g.class_coords) > 0));
        }
    }
}
