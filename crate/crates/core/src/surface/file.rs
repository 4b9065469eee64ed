use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CurveClass, SectionOracle, SurfaceModel};
use crate::divisor::ZDivisor;
use crate::error::{Error, Result};

/// One row of a tabulated `h0` oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H0Entry {
    pub class: Vec<i64>,
    pub h0: u64,
}

/// `"hirzebruch:<e>"`, `"p2"`, or an explicit `h0` table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OracleSpec {
    Named(String),
    Table { h0_table: Vec<H0Entry> },
}

/// On-disk form of a [`SurfaceModel`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub name: String,
    pub basis: Vec<String>,
    pub matrix: Vec<Vec<i64>>,
    pub mori_generators: Vec<CurveClass>,
    pub effective_generators: Vec<Vec<i64>>,
    pub canonical: Vec<i64>,
    pub chi: i64,
    pub oracle: OracleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ample: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_catalog: Option<Vec<CurveClass>>,
}

fn bad(field: &str, msg: impl Into<String>) -> Error {
    Error::config(field, msg)
}

fn check_vec(field: &str, v: &[i64], rank: usize) -> Result<()> {
    if v.len() != rank {
        return Err(bad(field, format!("expected {rank} coordinates, got {}", v.len())));
    }
    Ok(())
}

impl SurfaceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| bad("surface", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("surface description serializes")
    }

    /// Checks shape and consistency, then builds the model.
    pub fn build(&self) -> Result<SurfaceModel> {
        let rank = self.basis.len();
        if rank == 0 {
            return Err(bad("basis", "empty basis"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for b in &self.basis {
            if b.is_empty() || !b.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(bad("basis", format!("label {b:?} must be alphanumeric")));
            }
            if b.chars().next().is_some_and(|c| c.is_ascii_digit()) || b == "sqrt" {
                return Err(bad("basis", format!("label {b:?} is ambiguous in divisor syntax")));
            }
            if !seen.insert(b) {
                return Err(bad("basis", format!("duplicate label {b:?}")));
            }
        }
        if self.matrix.len() != rank || self.matrix.iter().any(|r| r.len() != rank) {
            return Err(bad("matrix", format!("must be {rank}x{rank}")));
        }
        for i in 0..rank {
            for j in 0..rank {
                if self.matrix[i][j] != self.matrix[j][i] {
                    return Err(bad("matrix", format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        if self.mori_generators.is_empty() {
            return Err(bad("mori_generators", "at least one generator required"));
        }
        for g in &self.mori_generators {
            check_vec("mori_generators", &g.class_coords, rank)?;
            if g.class_coords.iter().all(|&c| c == 0) {
                return Err(bad("mori_generators", format!("generator {} is zero", g.label)));
            }
            if g.multiplicity == 0 {
                return Err(bad("mori_generators", format!("generator {} has multiplicity 0", g.label)));
            }
        }
        if self.effective_generators.is_empty() {
            return Err(bad("effective_generators", "at least one generator required"));
        }
        for v in &self.effective_generators {
            check_vec("effective_generators", v, rank)?;
            if v.iter().all(|&c| c == 0) {
                return Err(bad("effective_generators", "zero generator"));
            }
        }
        check_vec("canonical", &self.canonical, rank)?;

        let catalog = match &self.curve_catalog {
            Some(c) => {
                for g in c {
                    check_vec("curve_catalog", &g.class_coords, rank)?;
                    if g.multiplicity == 0 {
                        return Err(bad("curve_catalog", format!("{} has multiplicity 0", g.label)));
                    }
                }
                c.clone()
            }
            None => self.mori_generators.clone(),
        };

        let oracle = match &self.oracle {
            OracleSpec::Named(id) => {
                let reference = SurfaceModel::builtin(id).map_err(|e| bad("oracle", e.to_string()))?;
                if reference.matrix != self.matrix {
                    return Err(bad("matrix", format!("does not match the {id} oracle")));
                }
                if reference.canonical.coords() != self.canonical.as_slice() {
                    return Err(bad("canonical", format!("does not match the {id} oracle")));
                }
                if reference.chi != self.chi {
                    return Err(bad("chi", format!("does not match the {id} oracle")));
                }
                reference.oracle
            }
            OracleSpec::Table { h0_table } => {
                let mut t = BTreeMap::new();
                for entry in h0_table {
                    check_vec("oracle.h0_table", &entry.class, rank)?;
                    if t.insert(ZDivisor::new(entry.class.clone()), entry.h0).is_some() {
                        return Err(bad("oracle.h0_table", format!("duplicate class {:?}", entry.class)));
                    }
                }
                if let Some(h) = t.get(&ZDivisor::zero(rank)) {
                    if *h != 1 {
                        return Err(bad("oracle.h0_table", "h0(0) must be 1"));
                    }
                }
                SectionOracle::Table(t)
            }
        };

        let mut model = SurfaceModel {
            name: self.name.clone(),
            basis: self.basis.clone(),
            matrix: self.matrix.clone(),
            mori: self.mori_generators.clone(),
            effective: self.effective_generators.iter().cloned().map(ZDivisor::new).collect(),
            canonical: ZDivisor::new(self.canonical.clone()),
            chi: self.chi,
            catalog,
            ample: ZDivisor::zero(rank),
            oracle,
        };
        // Riemann-Roch needs Z^2 = Z.K (mod 2) on every basis vector.
        for k in 0..rank {
            let u = ZDivisor::unit(rank, k);
            if (model.pair(&u, &u) - model.pair(&u, &model.canonical)).rem_euclid(2) != 0 {
                return Err(bad("canonical", format!("K is not characteristic on {}", self.basis[k])));
            }
        }
        model.ample = match &self.ample {
            Some(h) => {
                check_vec("ample", h, rank)?;
                let h = ZDivisor::new(h.clone());
                if !model.mori.iter().all(|g| model.pair_coords(h.coords(), &g.class_coords) > 0) {
                    return Err(bad("ample", "class is not positive on every Mori generator"));
                }
                h
            }
            None => find_ample(&model).ok_or_else(|| bad("ample", "no ample class found; declare one"))?,
        };
        Ok(model)
    }
}

/// Smallest-norm class in a small box that is positive on every generator.
fn find_ample(s: &SurfaceModel) -> Option<ZDivisor> {
    const R: i64 = 6;
    let rank = s.rank();
    let mut best: Option<(i64, ZDivisor)> = None;
    let mut v = vec![-R; rank];
    loop {
        let z = ZDivisor::new(v.clone());
        if s.mori.iter().all(|g| s.pair_coords(z.coords(), &g.class_coords) > 0) {
            let norm: i64 = v.iter().map(|c| c.abs()).sum();
            if best.as_ref().is_none_or(|(n, _)| norm < *n) {
                best = Some((norm, z));
            }
        }
        let mut k = 0;
        loop {
            if k == rank {
                return best.map(|(_, z)| z);
            }
            v[k] += 1;
            if v[k] <= R {
                break;
            }
            v[k] = -R;
            k += 1;
        }
    }
}

impl SurfaceModel {
    pub fn from_spec(spec: &SurfaceSpec) -> Result<Self> {
        spec.build()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        SurfaceSpec::from_json(text)?.build()
    }

    /// Loads a surface file, or resolves a builtin id when `arg` is not a file.
    pub fn load(arg: &str) -> Result<Self> {
        let p = Path::new(arg);
        if p.is_file() {
            let text = std::fs::read_to_string(p).map_err(|e| bad("surface", format!("{arg}: {e}")))?;
            Self::from_json(&text)
        } else {
            Self::builtin(arg)
        }
    }

    pub fn to_spec(&self) -> SurfaceSpec {
        let oracle = match &self.oracle {
            SectionOracle::Hirzebruch { e } => OracleSpec::Named(format!("hirzebruch:{e}")),
            SectionOracle::ProjectivePlane => OracleSpec::Named("p2".into()),
            SectionOracle::Table(t) => OracleSpec::Table {
                h0_table: t
                    .iter()
                    .map(|(k, v)| H0Entry {
                        class: k.coords().to_vec(),
                        h0: *v,
                    })
                    .collect(),
            },
        };
        SurfaceSpec {
            name: self.name.clone(),
            basis: self.basis.clone(),
            matrix: self.matrix.clone(),
            mori_generators: self.mori.clone(),
            effective_generators: self.effective.iter().map(|z| z.coords().to_vec()).collect(),
            canonical: self.canonical.coords().to_vec(),
            chi: self.chi,
            oracle,
            ample: Some(self.ample.coords().to_vec()),
            curve_catalog: (self.catalog != self.mori).then(|| self.catalog.clone()),
        }
    }
}
