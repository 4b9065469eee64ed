use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::divisor::ZDivisor;
use crate::error::{Error, Result};
use crate::exact_numbers::{format_rational, is_square_free, parse_rational};
use crate::positivity::{default_twists, EvalOptions};
use crate::surface::SurfaceModel;

/// How sampled coefficients are drawn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientProfile {
    /// `p/q` with `|p| <= max_num`, `1 <= q <= max_den`.
    Rational { max_num: i64, max_den: i64 },
    /// `p/q + (r/s) sqrt(d)` with `|p|, |r| <= height` and `q, s <= max_den`.
    Quadratic { d: u64, height: i64, max_den: i64 },
}

fn default_m_max() -> u64 {
    200
}

fn default_delta() -> String {
    "1/1000".into()
}

fn default_cap() -> u64 {
    20_000
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub seed: u64,
    /// Builtin ids or paths to surface files.
    pub surfaces: Vec<String>,
    pub n_divisors: usize,
    pub profile: CoefficientProfile,
    #[serde(default = "default_m_max")]
    pub m_max: u64,
    /// Twists for the sheaf quantifiers; per-surface defaults when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist_catalog: Option<Vec<Vec<i64>>>,
    #[serde(default = "default_delta")]
    pub delta: String,
    #[serde(default = "default_cap")]
    pub horizon_cap: u64,
}

impl AuditConfig {
    pub fn new(seed: u64, surfaces: &[&str], n_divisors: usize, profile: CoefficientProfile) -> Self {
        AuditConfig {
            seed,
            surfaces: surfaces.iter().map(|s| s.to_string()).collect(),
            n_divisors,
            profile,
            m_max: default_m_max(),
            twist_catalog: None,
            delta: default_delta(),
            horizon_cap: default_cap(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: AuditConfig = serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn delta_value(&self) -> Result<BigRational> {
        let d = parse_rational(&self.delta).map_err(|e| Error::config("delta", e.to_string()))?;
        if !d.is_positive() {
            return Err(Error::config("delta", format!("must be positive, got {}", format_rational(&d))));
        }
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_divisors < 1 {
            return Err(Error::config("n_divisors", "must be at least 1"));
        }
        if self.m_max < 10 {
            return Err(Error::config("m_max", "must be at least 10"));
        }
        if self.surfaces.is_empty() {
            return Err(Error::config("surfaces", "at least one surface required"));
        }
        match self.profile {
            CoefficientProfile::Rational { max_num, max_den } => {
                if max_num < 1 || max_den < 1 {
                    return Err(Error::config("profile", "bounds must be at least 1"));
                }
            }
            CoefficientProfile::Quadratic { d, height, max_den } => {
                if d < 2 || !is_square_free(d) {
                    return Err(Error::config("profile.d", format!("{d} is not a square-free integer > 1")));
                }
                if height < 1 || max_den < 1 {
                    return Err(Error::config("profile", "bounds must be at least 1"));
                }
            }
        }
        self.delta_value()?;
        for s in self.load_surfaces()? {
            if let Some(t) = &self.twist_catalog {
                if t.iter().any(|v| v.len() != s.rank()) {
                    return Err(Error::config("twist_catalog", format!("entries must have {} coordinates", s.rank())));
                }
            }
        }
        Ok(())
    }

    pub fn load_surfaces(&self) -> Result<Vec<SurfaceModel>> {
        self.surfaces
            .iter()
            .map(|id| SurfaceModel::load(id).map_err(|e| Error::config("surfaces", e.to_string())))
            .collect()
    }

    pub fn eval_options(&self, s: &SurfaceModel) -> Result<EvalOptions> {
        let mut o = EvalOptions::new(s);
        o.m_max = self.m_max;
        o.delta = self.delta_value()?;
        o.horizon_cap = self.horizon_cap;
        o.twists = match &self.twist_catalog {
            Some(t) => t.iter().cloned().map(ZDivisor::new).collect(),
            None => default_twists(s),
        };
        Ok(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let c = AuditConfig::from_json(
            r#"{"seed": 42, "surfaces": ["hirzebruch:2", "p2"], "n_divisors": 5,
                "profile": {"kind": "rational", "max_num": 30, "max_den": 12}}"#,
        )
        .unwrap();
        assert_eq!(c.m_max, 200);
        assert_eq!(AuditConfig::from_json(&c.to_json()).unwrap(), c);
        let bad = |text: &str, field: &str| match AuditConfig::from_json(text) {
            Err(Error::Config { field: f, .. }) => assert_eq!(f, field, "{text}"),
            other => panic!("{other:?}"),
        };
        bad(
            r#"{"seed": 1, "surfaces": ["p2"], "n_divisors": 0, "profile": {"kind": "rational", "max_num": 3, "max_den": 2}}"#,
            "n_divisors",
        );
        bad(
            r#"{"seed": 1, "surfaces": ["p2"], "n_divisors": 3, "m_max": 5, "profile": {"kind": "rational", "max_num": 3, "max_den": 2}}"#,
            "m_max",
        );
        bad(
            r#"{"seed": 1, "surfaces": ["p2"], "n_divisors": 3, "profile": {"kind": "quadratic", "d": 4, "height": 3, "max_den": 2}}"#,
            "profile.d",
        );
        bad(
            r#"{"seed": 1, "surfaces": ["nowhere"], "n_divisors": 3, "profile": {"kind": "rational", "max_num": 3, "max_den": 2}}"#,
            "surfaces",
        );
        bad(
            r#"{"seed": 1, "surfaces": ["p2"], "n_divisors": 3, "delta": "-1", "profile": {"kind": "rational", "max_num": 3, "max_den": 2}}"#,
            "delta",
        );
    }
}
