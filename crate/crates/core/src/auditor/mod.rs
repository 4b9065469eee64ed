//! Seeded cross-checks of the criteria against the cone oracle.

mod config;
mod sample;

use std::collections::BTreeMap;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{AuditConfig, CoefficientProfile};
pub use sample::sample_divisors;

use crate::divisor::RDivisor;
use crate::error::{Error, Result};
use crate::exact_numbers::{weyl_find, QuadExt};
use crate::positivity::{
    check, intersect, is_ample_cone, is_big, Condition, Fault, PositivityReport,
    Witness, AMPLE_RATIONAL, AMPLE_REAL, BIG,
};
use crate::surface::SurfaceModel;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub surface: String,
    pub index: usize,
    pub divisor: String,
    /// The two sides that disagree, e.g. `("QVI", "cone")`.
    pub criteria: (String, String),
    pub details: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inconclusive {
    pub surface: String,
    pub index: usize,
    pub divisor: String,
    pub criterion: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replication {
    pub passed: bool,
    pub details: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditOutcome {
    pub suites: Vec<String>,
    pub seed: u64,
    pub reports: Vec<PositivityReport>,
    pub discrepancies: Vec<Discrepancy>,
    pub inconclusive: Vec<Inconclusive>,
    pub replications: BTreeMap<String, Replication>,
}

impl AuditOutcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcome serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("outcome", e.to_string()))
    }

    /// No discrepancies and every replication passed.
    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty() && self.replications.values().all(|r| r.passed)
    }

    fn merge(&mut self, other: AuditOutcome) {
        self.suites.extend(other.suites);
        if self.reports.is_empty() {
            self.reports = other.reports;
        }
        self.discrepancies.extend(other.discrepancies);
        self.inconclusive.extend(other.inconclusive);
        self.replications.extend(other.replications);
    }
}

/// One evaluated sample.
pub struct Sample {
    pub surface: usize,
    pub index: usize,
    pub report: PositivityReport,
}

/// Draws and evaluates every sample of the config, in parallel, in index order.
pub fn evaluate(config: &AuditConfig, fault: Option<Fault>) -> Result<(Vec<SurfaceModel>, Vec<Sample>)> {
    config.validate()?;
    let surfaces = config.load_surfaces()?;
    let mut jobs = Vec::new();
    for (si, s) in surfaces.iter().enumerate() {
        for (i, d) in sample_divisors(s, &config.profile, config.seed, si as u64, config.n_divisors).into_iter().enumerate() {
            jobs.push((si, i, d));
        }
    }
    let options = surfaces
        .iter()
        .map(|s| {
            let mut o = config.eval_options(s)?;
            o.fault = fault;
            Ok(o)
        })
        .collect::<Result<Vec<_>>>()?;
    let samples = jobs
        .into_par_iter()
        .map(|(si, index, d)| {
            let report = check(&surfaces[si], &d, &options[si])?;
            Ok(Sample { surface: si, index, report })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((surfaces, samples))
}

fn discrepancy(s: &SurfaceModel, x: &Sample, a: &str, b: &str, details: String) -> Discrepancy {
    Discrepancy {
        surface: s.name().to_string(),
        index: x.index,
        divisor: x.report.divisor.to_string(),
        criteria: (a.to_string(), b.to_string()),
        details,
    }
}

/// Bounded scans must agree with exact answers that fall inside the scan range,
/// and every witness must survive recomputation.
fn internal_consistency(s: &SurfaceModel, x: &Sample, ids: &[&str], out: &mut AuditOutcome) -> Result<()> {
    let r = &x.report;
    for id in ids {
        let Some(v) = r.verdicts.get(*id) else { continue };
        let Witness::Runs { runs } = &v.witness else { continue };
        for run in runs {
            let Some(e) = run.exact else { continue };
            let kodaira = matches!(run.condition, Condition::Kodaira { .. });
            if let Some(m0) = e.from.filter(|&m| m <= r.m_max) {
                let ok = if kodaira {
                    run.scan_from.is_some_and(|m| m <= m0)
                } else {
                    run.scan_from == Some(m0)
                };
                if !ok {
                    out.discrepancies.push(discrepancy(
                        s,
                        x,
                        id,
                        "scan",
                        format!("{}: exact m0 = {m0}, scan gives {:?}", run.condition.describe(s), run.scan_from),
                    ));
                }
            }
            if let Some(m1) = e.first.filter(|&m| m <= r.m_max) {
                if run.scan_first != Some(m1) {
                    out.discrepancies.push(discrepancy(
                        s,
                        x,
                        id,
                        "scan",
                        format!("{}: exact first = {m1}, scan gives {:?}", run.condition.describe(s), run.scan_first),
                    ));
                }
            }
        }
    }
    for failure in r.recheck(s)? {
        out.discrepancies.push(discrepancy(s, x, "witness", "recomputation", failure));
    }
    Ok(())
}

fn compare(s: &SurfaceModel, x: &Sample, ids: &[&str], truth: bool, truth_name: &str, out: &mut AuditOutcome) {
    for id in ids {
        let Some(v) = x.report.verdicts.get(*id) else { continue };
        if !v.conclusive {
            out.inconclusive.push(Inconclusive {
                surface: s.name().to_string(),
                index: x.index,
                divisor: x.report.divisor.to_string(),
                criterion: id.to_string(),
                reason: format!("not settled within m_max = {}", x.report.m_max),
            });
        } else if v.holds != truth {
            out.discrepancies.push(discrepancy(
                s,
                x,
                id,
                truth_name,
                format!("{id} = {}, {truth_name} = {truth}: {}", v.holds, v.witness.summary(s)),
            ));
        }
    }
}

pub fn ampleness_on(config: &AuditConfig, surfaces: &[SurfaceModel], samples: &[Sample]) -> Result<AuditOutcome> {
    let mut out = AuditOutcome {
        suites: vec!["ampleness".into()],
        seed: config.seed,
        ..Default::default()
    };
    for x in samples {
        let s = &surfaces[x.surface];
        let ids: &[&str] = if x.report.field == 0 { &AMPLE_RATIONAL } else { &AMPLE_REAL };
        compare(s, x, ids, x.report.ground_truth, "cone", &mut out);
        internal_consistency(s, x, ids, &mut out)?;
    }
    Ok(out)
}

/// Ampleness criteria against the cone oracle.
pub fn audit_ampleness(config: &AuditConfig) -> Result<AuditOutcome> {
    let (surfaces, samples) = evaluate(config, None)?;
    let mut out = ampleness_on(config, &surfaces, &samples)?;
    out.reports = samples.into_iter().map(|x| x.report).collect();
    Ok(out)
}

/// Number of ampleness discrepancies produced by each deliberate fault.
pub fn fault_self_tests(config: &AuditConfig) -> Result<BTreeMap<Fault, usize>> {
    let mut counts = BTreeMap::new();
    for fault in Fault::ALL {
        let (surfaces, samples) = evaluate(config, Some(fault))?;
        counts.insert(fault, ampleness_on(config, &surfaces, &samples)?.discrepancies.len());
    }
    Ok(counts)
}

fn fault_name(f: Fault) -> &'static str {
    match f {
        Fault::FlipConeOracle => "flip_cone_oracle",
        Fault::SeshadriSkipsFirstCurve => "seshadri_skips_first_curve",
        Fault::NakaiSelfIntersectionOnly => "nakai_self_intersection_only",
    }
}

/// `B + sN` stays big for big `B`, effective `N`, and `s` in `{1/3, sqrt 2, 2}`.
fn big_plus_effective(config: &AuditConfig, surfaces: &[SurfaceModel], samples: &[Sample]) -> Result<Replication> {
    const PER_SURFACE: usize = 10;
    let scalars = [QuadExt::from_ratio(1, 3), QuadExt::sqrt_times(BigRational::from_integer(1.into()), 2), QuadExt::from_int(2)];
    let mut details = Vec::new();
    let mut passed = true;
    for (si, s) in surfaces.iter().enumerate() {
        let bigs: Vec<&PositivityReport> = samples
            .iter()
            .filter(|x| x.surface == si && x.report.big && matches!(x.report.field, 0 | 2))
            .map(|x| &x.report)
            .take(PER_SURFACE)
            .collect();
        let profile = CoefficientProfile::Rational { max_num: 10, max_den: 6 };
        let effs = sample_divisors(s, &profile, config.seed ^ 0x5eed, si as u64, bigs.len());
        let mut checked = 0;
        for (b, n_raw) in bigs.iter().zip(effs) {
            // Map an arbitrary draw into the effective cone: |c_j| on each generator.
            let c = n_raw.coords(s)?;
            let mut n = vec![QuadExt::zero(); s.rank()];
            for (cj, g) in c.iter().cycle().zip(s.effective_generators()) {
                for (k, nk) in n.iter_mut().enumerate() {
                    *nk = nk.try_add(&cj.abs().scale_int(g.coords()[k]))?;
                }
            }
            let b_coords = b.divisor.coords(s)?;
            for t in &scalars {
                let sum: Vec<QuadExt> = b_coords
                    .iter()
                    .zip(&n)
                    .map(|(x, y)| x.try_add(&y.try_mul(t)?))
                    .collect::<Result<_>>()?;
                let e = RDivisor::from_coords(s, &sum)?;
                checked += 1;
                if !is_big(s, &e)?.holds {
                    passed = false;
                    details.push(format!("{}: {} + ({t})N not big", s.name(), b.divisor));
                }
            }
        }
        details.push(format!("{}: {checked} cases", s.name()));
    }
    Ok(Replication { passed, details })
}

pub fn bigness_on(config: &AuditConfig, surfaces: &[SurfaceModel], samples: &[Sample]) -> Result<AuditOutcome> {
    let mut out = AuditOutcome {
        suites: vec!["bigness".into()],
        seed: config.seed,
        ..Default::default()
    };
    for x in samples {
        let s = &surfaces[x.surface];
        compare(s, x, &BIG, x.report.big, "B1", &mut out);
        internal_consistency(s, x, &BIG, &mut out)?;
    }
    out.replications
        .insert("big_plus_effective".into(), big_plus_effective(config, surfaces, samples)?);
    Ok(out)
}

/// Bigness criteria against the effective-cone test.
pub fn audit_bigness(config: &AuditConfig) -> Result<AuditOutcome> {
    let (surfaces, samples) = evaluate(config, None)?;
    let mut out = bigness_on(config, &surfaces, &samples)?;
    out.reports = samples.into_iter().map(|x| x.report).collect();
    Ok(out)
}

/// `frac(k a) * |D_j . C| < 1` for some `k`, for each irrational coefficient on a curve it meets negatively.
fn weyl_subcheck(surfaces: &[SurfaceModel], samples: &[Sample]) -> Result<Replication> {
    let mut details = Vec::new();
    let mut passed = true;
    let mut checked = 0;
    let mut run = |alpha: &QuadExt, neg: i64, what: String| -> Result<()> {
        let eps = BigRational::new(1.into(), neg.unsigned_abs().into());
        let k = weyl_find(alpha, &eps, 1)?;
        let ok = alpha.scale_int(k as i64).frac().scale_int(neg.abs()) < QuadExt::one();
        checked += 1;
        if !ok {
            passed = false;
            details.push(format!("{what}: k = {k} does not satisfy the bound"));
        }
        Ok(())
    };
    run(&QuadExt::sqrt_times(BigRational::from_integer(1.into()), 2), -2, "sqrt(2) against C^2 = -2".into())?;
    for x in samples {
        let s = &surfaces[x.surface];
        let coords = x.report.divisor.coords(s)?;
        for (j, a) in coords.iter().enumerate() {
            if a.is_rational() {
                continue;
            }
            let dj = crate::divisor::ZDivisor::unit(s.rank(), j);
            for g in s.mori_generators() {
                let p = s.pair_coords(dj.coords(), &g.class_coords);
                if p < 0 {
                    run(a, p, format!("{} coefficient {a} on {}", x.report.divisor, g.label))?;
                }
            }
        }
    }
    details.push(format!("{checked} coefficients"));
    Ok(Replication { passed, details })
}

pub fn nef_from_multiples_on(config: &AuditConfig, surfaces: &[SurfaceModel], samples: &[Sample]) -> Result<AuditOutcome> {
    let mut out = AuditOutcome {
        suites: vec!["nef_from_multiples".into()],
        seed: config.seed,
        ..Default::default()
    };
    let mut selected = 0usize;
    for x in samples {
        let s = &surfaces[x.surface];
        let Some(v) = x.report.verdicts.get("QIII") else { continue };
        let Witness::Runs { runs } = &v.witness else { continue };
        let Some(m0) = runs[0].scan_from else { continue };
        selected += 1;
        if !x.report.nef {
            out.discrepancies.push(discrepancy(s, x, "very_ample_multiples", "nef", format!("very ample on [{m0}, {}] but not nef", x.report.m_max)));
        }
        if s.rank() == 2 && !x.report.ground_truth {
            out.discrepancies.push(discrepancy(s, x, "very_ample_multiples", "cone", format!("very ample on [{m0}, {}] but not ample", x.report.m_max)));
        }
    }
    out.replications.insert(
        "nef_from_multiples".into(),
        Replication {
            passed: out.discrepancies.is_empty(),
            details: vec![format!("{selected} divisors very ample on a terminal range")],
        },
    );
    out.replications.insert("weyl".into(), weyl_subcheck(surfaces, samples)?);
    Ok(out)
}

/// Divisors whose multiples are very ample on `[m0, m_max]` must be nef, and ample when `rho = 2`.
pub fn audit_nef_from_multiples(config: &AuditConfig) -> Result<AuditOutcome> {
    let (surfaces, samples) = evaluate(config, None)?;
    let mut out = nef_from_multiples_on(config, &surfaces, &samples)?;
    out.reports = samples.into_iter().map(|x| x.report).collect();
    Ok(out)
}

/// Every suite on one shared evaluation, plus fault self-tests and the boundary example.
pub fn audit_all(config: &AuditConfig) -> Result<AuditOutcome> {
    let (surfaces, samples) = evaluate(config, None)?;
    let mut out = ampleness_on(config, &surfaces, &samples)?;
    out.merge(bigness_on(config, &surfaces, &samples)?);
    out.merge(nef_from_multiples_on(config, &surfaces, &samples)?);
    for (fault, n) in fault_self_tests(config)? {
        out.replications.insert(
            format!("fault:{}", fault_name(fault)),
            Replication {
                passed: n > 0,
                details: vec![format!("{n} discrepancies")],
            },
        );
    }
    let ex = replicate_boundary_example(&[2, 3, 4])?;
    out.replications.insert(
        "boundary_example".into(),
        Replication {
            passed: ex.passed,
            details: ex.rows.iter().map(|r| r.to_string()).collect(),
        },
    );
    out.suites.push("boundary_example".into());
    out.reports = samples.into_iter().map(|x| x.report).collect();
    Ok(out)
}

/// `D = (3/2) C0 + (e + 1) f` on `F_e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleRow {
    pub e: i64,
    pub divisor: String,
    pub floor_very_ample: bool,
    pub pairing_c0: QuadExt,
    pub expected_pairing: QuadExt,
    pub ample: bool,
    pub passed: bool,
}

impl std::fmt::Display for ExampleRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "e={} D={} [D] very ample={} D.C0={} (1 - e/2 = {}) ample={} {}",
            self.e,
            self.divisor,
            self.floor_very_ample,
            self.pairing_c0,
            self.expected_pairing,
            self.ample,
            if self.passed { "ok" } else { "FAILED" }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleReplication {
    pub rows: Vec<ExampleRow>,
    pub passed: bool,
}

/// Very ample integral part, non-positive pairing with `C0`, not ample.
pub fn replicate_boundary_example(e_list: &[i64]) -> Result<ExampleReplication> {
    let mut rows = Vec::new();
    for &e in e_list {
        if e < 2 {
            return Err(Error::InvalidInput(format!("e = {e}: the example needs e >= 2")));
        }
        let s = SurfaceModel::hirzebruch(e)?;
        let d = RDivisor::prime([("C0", QuadExt::from_ratio(3, 2)), ("f", QuadExt::from_int(e + 1))])?;
        let floor_very_ample = s.very_ample(&d.integral_part(&s)?)?;
        let pairing_c0 = intersect(&s, &d, &RDivisor::parse("C0")?)?;
        let expected_pairing = QuadExt::from_ratio(2 - e, 2);
        let ample = is_ample_cone(&s, &d)?.holds;
        let passed = floor_very_ample && pairing_c0 == expected_pairing && !pairing_c0.is_positive() && !ample;
        rows.push(ExampleRow {
            e,
            divisor: d.to_string(),
            floor_very_ample,
            pairing_c0,
            expected_pairing,
            ample,
            passed,
        });
    }
    let passed = rows.iter().all(|r| r.passed);
    Ok(ExampleReplication { rows, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(profile: CoefficientProfile) -> AuditConfig {
        let mut c = AuditConfig::new(42, &["hirzebruch:2", "p2"], 12, profile);
        c.m_max = 60;
        c
    }

    #[test]
    fn boundary_example_rows() {
        let r = replicate_boundary_example(&[2, 3, 10]).unwrap();
        assert!(r.passed);
        assert_eq!(r.rows[0].pairing_c0, QuadExt::zero());
        assert_eq!(r.rows[1].pairing_c0, QuadExt::from_ratio(-1, 2));
        assert_eq!(r.rows[2].pairing_c0, QuadExt::from_int(-4));
        assert!(replicate_boundary_example(&[1]).is_err());
    }

    #[test]
    fn small_audits_are_clean_and_deterministic() {
        let c = small(CoefficientProfile::Rational { max_num: 30, max_den: 12 });
        let a = audit_all(&c).unwrap();
        assert!(a.discrepancies.is_empty(), "{:#?}", a.discrepancies);
        assert!(a.is_clean(), "{:#?}", a.replications);
        assert_eq!(a.to_json(), audit_all(&c).unwrap().to_json());
        assert_eq!(AuditOutcome::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn quadratic_audit_is_clean() {
        let c = small(CoefficientProfile::Quadratic { d: 2, height: 10, max_den: 6 });
        let a = audit_ampleness(&c).unwrap();
        assert!(a.discrepancies.is_empty(), "{:#?}", a.discrepancies);
        let b = audit_bigness(&c).unwrap();
        assert!(b.discrepancies.is_empty(), "{:#?}", b.discrepancies);
    }

    #[test]
    fn faults_are_detected() {
        let c = small(CoefficientProfile::Rational { max_num: 30, max_den: 12 });
        for (fault, n) in fault_self_tests(&c).unwrap() {
            assert!(n > 0, "{fault:?}");
        }
    }
}
