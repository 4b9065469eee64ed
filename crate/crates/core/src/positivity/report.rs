//! Every criterion evaluated on one divisor.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::cones::{
    ample_coords, big_coords, effective_facets, nakai_coords, neighborhood_coords, nef_coords, pair_coords, pair_curve,
    ratio_coords, seshadri_over, BigCertificate,
};
use super::scans::{growth_coords, GrowthCheck};
use super::sequence::{kodaira_exact, kodaira_least, Context, ExactRun, Series};
use crate::divisor::{RDivisor, ZDivisor};
use crate::error::{Error, Result};
use crate::exact_numbers::{common_field, lcm_all, QuadExt};
use crate::surface::{Predicate, SurfaceModel};

/// Deliberate defects used to check that the auditor notices disagreement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    FlipConeOracle,
    SeshadriSkipsFirstCurve,
    NakaiSelfIntersectionOnly,
}

impl Fault {
    pub const ALL: [Fault; 3] = [
        Fault::FlipConeOracle,
        Fault::SeshadriSkipsFirstCurve,
        Fault::NakaiSelfIntersectionOnly,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub m_max: u64,
    pub delta: BigRational,
    /// Twists `G` standing in for coherent sheaves.
    pub twists: Vec<ZDivisor>,
    /// Largest horizon the exact engine may scan to.
    pub horizon_cap: u64,
    pub fault: Option<Fault>,
}

impl EvalOptions {
    pub fn new(s: &SurfaceModel) -> Self {
        EvalOptions {
            m_max: 200,
            delta: BigRational::new(1.into(), 1000.into()),
            twists: default_twists(s),
            horizon_cap: 20_000,
            fault: None,
        }
    }
}

/// `0` and `-(B_i1 + ... + B_ik)` for every nonempty set of basis vectors.
pub fn default_twists(s: &SurfaceModel) -> Vec<ZDivisor> {
    let r = s.rank();
    (0u32..1 << r)
        .map(|mask| ZDivisor::new((0..r).map(|k| -i64::from((mask >> k) & 1)).collect()))
        .collect()
}

/// The catalog together with its doubles. Boundary classes pass the
/// vanishing test for every single twist but fail for a doubled one.
pub fn vanishing_twists(twists: &[ZDivisor]) -> Vec<ZDivisor> {
    let mut out: Vec<ZDivisor> = twists.to_vec();
    for t in twists {
        let d = t.scale(2);
        if !out.contains(&d) {
            out.push(d);
        }
    }
    out
}

/// The predicate a run tracks along `[mD]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition {
    Oracle { predicate: Predicate, twist: ZDivisor },
    CurveDegree { curve: String, class: Vec<i64> },
    NonzeroSection,
    BigIntegral,
    /// `h0([mD]) > 0` and `h0([mD] - F) > 0`.
    Kodaira { f: ZDivisor },
}

impl Condition {
    /// Direct evaluation at `Z = [mD]`.
    pub fn holds_at(&self, s: &SurfaceModel, z: &ZDivisor) -> Result<bool> {
        match self {
            Condition::Oracle { predicate, twist } => s.evaluate(*predicate, &(twist + z)),
            Condition::CurveDegree { class, .. } => Ok(z.dot(&s.pairing_row(class)) >= 1),
            Condition::NonzeroSection => Ok(!z.is_zero() && s.h0(z)? > 0),
            Condition::BigIntegral => {
                let facets = effective_facets(s);
                Ok(!facets.is_empty() && facets.iter().all(|n| z.dot(n) >= 1))
            }
            Condition::Kodaira { f } => Ok(s.h0(z)? > 0 && s.h0(&(z - f))? > 0),
        }
    }

    pub fn describe(&self, s: &SurfaceModel) -> String {
        let b = s.basis();
        match self {
            Condition::Oracle { predicate, twist } => {
                let name = match predicate {
                    Predicate::VeryAmple => "very_ample",
                    Predicate::GloballyGenerated => "globally_generated",
                    Predicate::Effective => "effective",
                    Predicate::Vanishing => "vanishing",
                };
                if twist.is_zero() {
                    name.to_string()
                } else {
                    format!("{name}[{}]", twist.format_with(b))
                }
            }
            Condition::CurveDegree { curve, .. } => format!("degree_on[{curve}]"),
            Condition::NonzeroSection => "section_on[X]".into(),
            Condition::BigIntegral => "big_integral".into(),
            Condition::Kodaira { f } => format!("kodaira[{}]", f.format_with(b)),
        }
    }
}

/// One predicate along the multiples: bounded scan plus, when available, the exact answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub condition: Condition,
    pub scan_from: Option<u64>,
    pub scan_first: Option<u64>,
    pub exact: Option<ExactRun>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Quantifier {
    /// Holds for every large `m`.
    Eventually,
    /// Holds for some `m >= 1`.
    Somewhere,
}

impl Run {
    fn from_series(condition: Condition, s: &Series) -> Self {
        Run {
            condition,
            scan_from: s.scan_from(),
            scan_first: s.scan_first(),
            exact: s.exact(),
        }
    }

    /// `(holds, decided exactly)`; undecided runs fall back to the scan,
    /// with "eventually" read as "from `m_max / 2` on".
    fn outcome(&self, q: Quantifier, m_max: u64) -> (bool, bool) {
        match (&self.exact, q) {
            (Some(e), Quantifier::Eventually) => (e.from.is_some(), true),
            (Some(e), Quantifier::Somewhere) => (e.first.is_some(), true),
            (None, Quantifier::Eventually) => (self.scan_from.is_some_and(|m| m <= m_max / 2), false),
            (None, Quantifier::Somewhere) => (self.scan_first.is_some(), self.scan_first.is_some()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Runs {
        runs: Vec<Run>,
    },
    Cone {
        pairings: Vec<(String, QuadExt)>,
        violating: Option<String>,
    },
    Nakai {
        self_intersection: QuadExt,
        violating: Option<String>,
    },
    Ratio {
        value: QuadExt,
        minimizer: String,
    },
    Seshadri {
        value: QuadExt,
        minimizer: String,
    },
    Neighborhood {
        delta: QuadExt,
        failing: Option<String>,
        radius: Option<QuadExt>,
    },
    Chi {
        self_intersection: QuadExt,
        curves: Vec<(String, QuadExt)>,
        /// Linear coefficient of `chi` along each residue class when `D^2 = 0`.
        linear: Option<Vec<QuadExt>>,
    },
    Certificate {
        epsilon_max: Option<QuadExt>,
        certificate: Option<BigCertificate>,
        multiple: Option<u64>,
    },
    Growth {
        check: GrowthCheck,
        /// Whether a pass is forced by the certificate lower bound.
        certified: Option<bool>,
    },
}

impl Witness {
    pub fn summary(&self, s: &SurfaceModel) -> String {
        let opt = |m: &Option<u64>| m.map_or("-".to_string(), |v| v.to_string());
        match self {
            Witness::Runs { runs } => runs
                .iter()
                .map(|r| {
                    let exact = r
                        .exact
                        .map_or("unsettled".to_string(), |e| format!("exact from={} first={}", opt(&e.from), opt(&e.first)));
                    format!(
                        "{}: scan from={} first={} {exact}",
                        r.condition.describe(s),
                        opt(&r.scan_from),
                        opt(&r.scan_first)
                    )
                })
                .collect::<Vec<_>>()
                .join("; "),
            Witness::Cone { pairings, violating } => {
                let p: Vec<String> = pairings.iter().map(|(l, v)| format!("D.{l}={v}")).collect();
                match violating {
                    Some(v) => format!("{} (fails on {v})", p.join(", ")),
                    None => p.join(", "),
                }
            }
            Witness::Nakai { self_intersection, violating } => {
                format!("D^2={self_intersection}{}", violating.as_ref().map_or(String::new(), |v| format!(", fails on {v}")))
            }
            Witness::Ratio { value, minimizer } | Witness::Seshadri { value, minimizer } => {
                format!("min={value} at {minimizer}")
            }
            Witness::Neighborhood { delta, failing, radius } => format!(
                "delta={delta} radius={} failing={}",
                radius.as_ref().map_or("-".to_string(), |r| r.to_string()),
                failing.as_deref().unwrap_or("-")
            ),
            Witness::Chi { self_intersection, curves, linear } => {
                let c: Vec<String> = curves.iter().map(|(l, v)| format!("D.{l}={v}")).collect();
                let mut out = format!("D^2={self_intersection}, {}", c.join(", "));
                if let Some(l) = linear {
                    let _ = write!(out, ", linear={}", l.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("/"));
                }
                out
            }
            Witness::Certificate { epsilon_max, certificate, multiple } => {
                let mut out = format!("eps_max={}", epsilon_max.as_ref().map_or("-".to_string(), |e| e.to_string()));
                if let Some(c) = certificate {
                    let l: Vec<String> = c.lambda.iter().map(|v| v.to_string()).collect();
                    let _ = write!(out, ", eps={}, H={}, lambda=[{}]", c.epsilon, c.reference.format_with(s.basis()), l.join(", "));
                }
                if let Some(m) = multiple {
                    let _ = write!(out, ", m={m}");
                }
                out
            }
            Witness::Growth { check, certified } => format!(
                "C={} h0(M)={} h0(M/4)={} h0/M^2={}{}{}",
                check.c_estimate,
                check.h0_top,
                check.h0_quarter,
                check.leading,
                check.expected.as_ref().map_or(String::new(), |e| format!(" D^2/2={e}")),
                certified.map_or(String::new(), |c| format!(" certified={c}"))
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    /// False when a bounded search could not settle the criterion.
    pub conclusive: bool,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub surface: String,
    pub divisor: RDivisor,
    /// Radicand of the coefficient field, `0` for rational divisors.
    pub field: u64,
    pub m_max: u64,
    /// Cone-criterion ampleness.
    pub ground_truth: bool,
    pub nef: bool,
    pub big: bool,
    pub verdicts: BTreeMap<String, Verdict>,
}

/// Criterion ids whose verdict must match ampleness.
pub const AMPLE_RATIONAL: [&str; 10] = ["QI", "QII", "QIII", "QIV", "QV", "QVI", "QVII", "QVIII", "QIX", "QX"];
pub const AMPLE_REAL: [&str; 6] = ["Ri", "Rii", "Riii", "Riv", "Rv", "Rvi"];
/// Criterion ids whose verdict must match bigness.
pub const BIG: [&str; 8] = ["B1", "B2", "B3", "B4", "B5", "B6", "B7", "BK"];

fn keep(map: &mut BTreeMap<String, Verdict>, id: &str, v: Result<Verdict>) -> Result<()> {
    match v {
        Ok(v) => {
            map.insert(id.to_string(), v);
            Ok(())
        }
        Err(Error::OracleUnavailable(_)) => Ok(()),
        Err(e) => Err(e),
    }
}

fn runs_verdict(runs: Vec<Run>, q: Quantifier, m_max: u64) -> Verdict {
    let outcomes: Vec<(bool, bool)> = runs.iter().map(|r| r.outcome(q, m_max)).collect();
    let holds = outcomes.iter().all(|o| o.0);
    let conclusive = outcomes.iter().all(|o| o.1) || outcomes.iter().any(|&(h, c)| c && !h);
    Verdict {
        holds,
        conclusive,
        witness: Witness::Runs { runs },
    }
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

fn chi_verdict(ctx: &Context) -> Result<Verdict> {
    let s = ctx.s;
    let coords = &ctx.coords;
    let curves: Vec<(String, QuadExt)> = s
        .mori_generators()
        .iter()
        .map(|g| Ok((g.label.clone(), pair_curve(s, coords, &g.class_coords)?)))
        .collect::<Result<_>>()?;
    let self_intersection = pair_coords(s, coords, coords)?;
    let curves_ok = curves.iter().all(|(_, v)| v.is_positive());
    let mut linear = None;
    let (holds, conclusive) = if !curves_ok || self_intersection.is_negative() {
        (false, true)
    } else if self_intersection.is_positive() {
        (true, true)
    } else if coords.iter().all(|c| c.is_rational()) {
        // chi(B + tV) = chi(B) + t (B.V - V.K/2) + t^2 V^2 / 2 along each residue class.
        let dens: Vec<BigInt> = coords.iter().filter_map(|c| c.denominator()).collect();
        let k = lcm_all(dens.iter()).to_i64().ok_or_else(|| Error::InvalidInput("denominator too large".into()))?;
        let v = RDivisor::round_multiple(coords, k);
        let vq: Vec<QuadExt> = v.coords().iter().map(|&c| QuadExt::from_int(c)).collect();
        let vk = QuadExt::from_int(s.pair(&v, s.canonical_class())).scale_rational(&half());
        let mut terms = Vec::new();
        for i in 0..k {
            let b: Vec<QuadExt> = RDivisor::round_multiple(coords, i).coords().iter().map(|&c| QuadExt::from_int(c)).collect();
            terms.push(pair_coords(s, &b, &vq)?.try_sub(&vk)?);
        }
        let ok = terms.iter().all(|t| t.is_positive());
        linear = Some(terms);
        (ok, true)
    } else {
        (false, false)
    };
    Ok(Verdict {
        holds,
        conclusive,
        witness: Witness::Chi {
            self_intersection,
            curves,
            linear,
        },
    })
}

/// `h0(floor(m eps) H)` bounds `h0([mD])` from below when the effective cone is the basis orthant.
fn growth_certified(s: &SurfaceModel, cert: &BigCertificate, check: &GrowthCheck, m_max: u64) -> Result<Option<bool>> {
    let r = s.rank();
    let orthant = s.effective_generators().len() == r
        && (0..r).all(|k| s.effective_generators().iter().any(|g| *g == ZDivisor::unit(r, k)));
    if !orthant || cert.reference.coords().iter().any(|&c| c < 0) {
        return Ok(None);
    }
    let eps = cert.epsilon.as_rational().expect("rational epsilon");
    let lower = |m: u64| -> Result<u64> {
        let t = (eps * BigInt::from(m)).floor().to_integer().to_i64().unwrap_or(i64::MAX);
        s.h0(&cert.reference.scale(t))
    };
    if lower(m_max)? <= 8 * check.h0_quarter {
        return Ok(Some(false));
    }
    let c = check.c_estimate.as_rational().expect("rational estimate");
    for m in m_max.div_ceil(2)..=m_max {
        if BigRational::from_integer(lower(m)?.into()) < c * BigInt::from(m as u128 * m as u128) {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

/// Evaluates every supported criterion on `d`.
pub fn check(s: &SurfaceModel, d: &RDivisor, opts: &EvalOptions) -> Result<PositivityReport> {
    if opts.m_max < 4 {
        return Err(Error::InvalidInput("m_max must be at least 4".into()));
    }
    let coords = d.coords(s)?;
    let field = common_field(&coords)?;
    let m_max = opts.m_max;
    let ctx = Context::from_coords(s, coords.clone(), m_max, opts.horizon_cap);
    let zero = ZDivisor::zero(s.rank());
    let mut v: BTreeMap<String, Verdict> = BTreeMap::new();

    let cone = ample_coords(s, &coords)?;
    let nef = nef_coords(s, &coords)?.holds;
    let big_check = big_coords(s, &coords)?;

    // Cone, intersection and ratio criteria.
    let flip = opts.fault == Some(Fault::FlipConeOracle);
    v.insert(
        "QIX".into(),
        Verdict {
            holds: cone.holds != flip,
            conclusive: true,
            witness: Witness::Cone {
                pairings: cone.pairings.clone(),
                violating: cone.violating.clone(),
            },
        },
    );
    let nakai = nakai_coords(s, &coords)?;
    let nakai_holds = if opts.fault == Some(Fault::NakaiSelfIntersectionOnly) {
        nakai.self_intersection.is_positive()
    } else {
        nakai.holds
    };
    v.insert(
        "QVI".into(),
        Verdict {
            holds: nakai_holds,
            conclusive: true,
            witness: Witness::Nakai {
                self_intersection: nakai.self_intersection.clone(),
                violating: nakai.curves.violating.clone(),
            },
        },
    );
    let catalog = s.curve_catalog();
    let catalog = if opts.fault == Some(Fault::SeshadriSkipsFirstCurve) && catalog.len() > 1 {
        &catalog[1..]
    } else {
        catalog
    };
    let (sesh, sesh_at) = seshadri_over(s, &coords, catalog)?;
    v.insert(
        "QVII".into(),
        Verdict {
            holds: sesh.is_positive(),
            conclusive: true,
            witness: Witness::Seshadri { value: sesh, minimizer: sesh_at },
        },
    );
    let h: Vec<QuadExt> = s.ample_reference().coords().iter().map(|&c| QuadExt::from_int(c)).collect();
    let (ratio, ratio_at) = ratio_coords(s, &coords, &h)?;
    v.insert(
        "QVIII".into(),
        Verdict {
            holds: ratio.is_positive(),
            conclusive: true,
            witness: Witness::Ratio { value: ratio, minimizer: ratio_at },
        },
    );
    let nb = neighborhood_coords(s, &coords, &opts.delta)?;
    let delta_q = QuadExt::rational(opts.delta.clone());
    let too_wide = match &nb.radius {
        Some(r) => r.cmp_exact(&delta_q)?.is_le(),
        None => false,
    };
    v.insert(
        "QX".into(),
        Verdict {
            holds: nb.holds,
            conclusive: !too_wide,
            witness: Witness::Neighborhood {
                delta: delta_q,
                failing: nb.failing,
                radius: nb.radius,
            },
        },
    );
    keep(&mut v, "QV", chi_verdict(&ctx))?;

    // Multiples of D, twisted.
    let twist_runs = |pred: Predicate, twists: &[ZDivisor]| -> Result<Vec<Run>> {
        twists
            .iter()
            .map(|t| {
                let series = ctx.oracle(pred, t)?;
                Ok(Run::from_series(Condition::Oracle { predicate: pred, twist: t.clone() }, &series))
            })
            .collect()
    };
    keep(
        &mut v,
        "QI",
        twist_runs(Predicate::Vanishing, &vanishing_twists(&opts.twists)).map(|r| runs_verdict(r, Quantifier::Eventually, m_max)),
    )?;
    keep(
        &mut v,
        "QII",
        twist_runs(Predicate::GloballyGenerated, &opts.twists).map(|r| runs_verdict(r, Quantifier::Eventually, m_max)),
    )?;
    match twist_runs(Predicate::VeryAmple, std::slice::from_ref(&zero)) {
        Ok(r) => {
            v.insert("QIII".into(), runs_verdict(r.clone(), Quantifier::Eventually, m_max));
            v.insert("P1".into(), runs_verdict(r, Quantifier::Somewhere, m_max));
        }
        Err(Error::OracleUnavailable(_)) => {}
        Err(e) => return Err(e),
    }
    let subvariety_runs = || -> Result<Vec<Run>> {
        let mut runs: Vec<Run> = s
            .mori_generators()
            .iter()
            .map(|g| {
                let series = ctx.curve_degree_positive(&g.class_coords)?;
                Ok(Run::from_series(
                    Condition::CurveDegree {
                        curve: g.label.clone(),
                        class: g.class_coords.clone(),
                    },
                    &series,
                ))
            })
            .collect::<Result<_>>()?;
        runs.push(Run::from_series(Condition::NonzeroSection, &ctx.nonzero_section()?));
        Ok(runs)
    };
    match subvariety_runs() {
        Ok(r) => {
            v.insert("QIV".into(), runs_verdict(r.clone(), Quantifier::Eventually, m_max));
            v.insert("P5".into(), runs_verdict(r, Quantifier::Somewhere, m_max));
        }
        Err(Error::OracleUnavailable(_)) => {}
        Err(e) => return Err(e),
    }

    // Bigness.
    v.insert(
        "B1".into(),
        Verdict {
            holds: big_check.holds,
            conclusive: true,
            witness: Witness::Certificate {
                epsilon_max: big_check.epsilon_max.clone(),
                certificate: big_check.certificate.clone(),
                multiple: None,
            },
        },
    );
    let growth = || -> Result<Verdict> {
        let check = growth_coords(s, &coords, m_max)?;
        let certified = match &big_check.certificate {
            Some(c) if !check.pass => growth_certified(s, c, &check, m_max)?,
            _ => None,
        };
        Ok(Verdict {
            holds: check.pass,
            conclusive: check.pass || !big_check.holds || certified == Some(true),
            witness: Witness::Growth { check, certified },
        })
    };
    keep(&mut v, "B2", growth())?;
    let facets = effective_facets(s);
    v.insert(
        "B3".into(),
        runs_verdict(
            vec![Run::from_series(Condition::BigIntegral, &ctx.big_integral(&facets)?)],
            Quantifier::Eventually,
            m_max,
        ),
    );
    keep(
        &mut v,
        "B4",
        twist_runs(Predicate::Effective, &opts.twists).map(|r| runs_verdict(r, Quantifier::Somewhere, m_max)),
    )?;
    let eps_max = big_check.epsilon_max.clone().filter(|e| e.is_positive());
    let b5_multiple = match &eps_max {
        Some(e) => Some(
            (QuadExt::one().try_div(e)?.floor() + 1u32)
                .to_u64()
                .ok_or_else(|| Error::InvalidInput("multiple too large".into()))?,
        ),
        None => None,
    };
    v.insert(
        "B5".into(),
        Verdict {
            holds: eps_max.is_some(),
            conclusive: true,
            witness: Witness::Certificate {
                epsilon_max: big_check.epsilon_max.clone(),
                certificate: None,
                multiple: b5_multiple,
            },
        },
    );
    let cert_ok = match &big_check.certificate {
        Some(c) => c.verify(s, &coords)?,
        None => false,
    };
    v.insert(
        "B6".into(),
        Verdict {
            holds: cert_ok,
            conclusive: true,
            witness: Witness::Certificate {
                epsilon_max: None,
                certificate: big_check.certificate.clone(),
                multiple: None,
            },
        },
    );
    let b7_multiple = big_check
        .certificate
        .as_ref()
        .and_then(|c| c.epsilon.denominator())
        .and_then(|d| d.to_u64());
    v.insert(
        "B7".into(),
        Verdict {
            holds: cert_ok,
            conclusive: true,
            witness: Witness::Certificate {
                epsilon_max: None,
                certificate: big_check.certificate.clone(),
                multiple: b7_multiple,
            },
        },
    );
    let kodaira_runs = || -> Result<Vec<Run>> {
        kodaira_divisors(s)
            .into_iter()
            .map(|f| {
                let (both, implies) = ctx.kodaira(&f)?;
                let n = m_max as usize + 1;
                Ok(Run {
                    scan_from: kodaira_least(&both.values[..n], &implies.values[..n]),
                    scan_first: both.scan_first(),
                    exact: kodaira_exact(&both, &implies),
                    condition: Condition::Kodaira { f },
                })
            })
            .collect()
    };
    keep(
        &mut v,
        "BK",
        kodaira_runs().map(|r| runs_verdict(r, Quantifier::Eventually, m_max)),
    )?;

    // Aliases: the same executable test under each numbering.
    for (alias, source) in [
        ("P2", "QI"),
        ("P3", "QII"),
        ("P4", "QIII"),
        ("P6", "QV"),
        ("P7", "QVI"),
        ("P8", "QVII"),
        ("P9", "QVIII"),
        ("P10", "QIX"),
        ("P11", "QX"),
        ("Ri", "QII"),
        ("Rii", "QVI"),
        ("Riii", "QVII"),
        ("Riv", "QVIII"),
        ("Rv", "QIX"),
        ("Rvi", "QX"),
    ] {
        if let Some(x) = v.get(source).cloned() {
            v.insert(alias.into(), x);
        }
    }

    Ok(PositivityReport {
        surface: s.name().to_string(),
        divisor: d.clone(),
        field,
        m_max,
        ground_truth: cone.holds,
        nef,
        big: big_check.holds,
        verdicts: v,
    })
}

/// Effective generators and, when there are several, their sum.
pub fn kodaira_divisors(s: &SurfaceModel) -> Vec<ZDivisor> {
    let mut out: Vec<ZDivisor> = s.effective_generators().to_vec();
    if out.len() > 1 {
        let sum = out.iter().fold(ZDivisor::zero(s.rank()), |a, b| &a + b);
        out.push(sum);
    }
    out
}

impl PositivityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("report", e.to_string()))
    }

    /// Ids in display order: P, Q, R, B.
    pub fn ordered_ids(&self) -> Vec<&str> {
        let rank = |id: &str| -> (u8, usize) {
            let families: [&[&str]; 4] = [
                &["P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8", "P9", "P10", "P11"],
                &AMPLE_RATIONAL,
                &AMPLE_REAL,
                &BIG,
            ];
            for (fi, fam) in families.iter().enumerate() {
                if let Some(p) = fam.iter().position(|x| *x == id) {
                    return (fi as u8, p);
                }
            }
            (9, 0)
        };
        let mut ids: Vec<&str> = self.verdicts.keys().map(String::as_str).collect();
        ids.sort_by_key(|id| rank(id));
        ids
    }

    pub fn to_human(&self, s: &SurfaceModel) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "surface      {}", self.surface);
        let _ = writeln!(out, "divisor      {}", self.divisor);
        let _ = writeln!(out, "m_max        {}", self.m_max);
        let _ = writeln!(out, "ground_truth {}", self.ground_truth);
        let _ = writeln!(out, "nef          {}", self.nef);
        let _ = writeln!(out, "big          {}", self.big);
        for id in self.ordered_ids() {
            let v = &self.verdicts[id];
            let _ = writeln!(
                out,
                "{id:<6} {:<5} {:<12} {}",
                v.holds,
                if v.conclusive { "conclusive" } else { "inconclusive" },
                v.witness.summary(s)
            );
        }
        out
    }

    /// Recomputes each positive witness directly; returns the ones that fail.
    pub fn recheck(&self, s: &SurfaceModel) -> Result<Vec<String>> {
        let coords = self.divisor.coords(s)?;
        let at = |m: u64| RDivisor::round_multiple(&coords, m as i64);
        let mut bad = Vec::new();
        for (id, v) in &self.verdicts {
            match &v.witness {
                Witness::Runs { runs } => {
                    for r in runs {
                        let c = &r.condition;
                        let mut froms = vec![r.scan_from];
                        if let Some(e) = r.exact {
                            froms.push(e.from);
                        }
                        for m0 in froms.into_iter().flatten() {
                            if !c.holds_at(s, &at(m0))? {
                                bad.push(format!("{id}: {} fails at m = {m0}", c.describe(s)));
                            }
                            let minimal_checkable = !matches!(c, Condition::Kodaira { .. });
                            if m0 > 0 && minimal_checkable && c.holds_at(s, &at(m0 - 1))? {
                                bad.push(format!("{id}: {} holds before m = {m0}", c.describe(s)));
                            }
                        }
                        let firsts = [r.scan_first, r.exact.and_then(|e| e.first)];
                        for m in firsts.into_iter().flatten() {
                            if !c.holds_at(s, &at(m))? {
                                bad.push(format!("{id}: {} fails at m = {m}", c.describe(s)));
                            }
                        }
                    }
                }
                Witness::Cone { pairings, .. } => {
                    for (label, val) in pairings {
                        let g = s.mori_generators().iter().find(|g| &g.label == label);
                        match g {
                            Some(g) if pair_curve(s, &coords, &g.class_coords)? == *val => {}
                            _ => bad.push(format!("{id}: pairing with {label}")),
                        }
                    }
                }
                Witness::Nakai { self_intersection, .. } => {
                    if pair_coords(s, &coords, &coords)? != *self_intersection {
                        bad.push(format!("{id}: self-intersection"));
                    }
                }
                Witness::Certificate { certificate: Some(c), .. } => {
                    if !c.verify(s, &coords)? {
                        bad.push(format!("{id}: certificate"));
                    }
                }
                Witness::Ratio { value, minimizer } => {
                    let g = s.mori_generators().iter().find(|g| &g.label == minimizer);
                    let h: Vec<QuadExt> = s.ample_reference().coords().iter().map(|&c| QuadExt::from_int(c)).collect();
                    let ok = match g {
                        Some(g) => pair_curve(s, &coords, &g.class_coords)?.try_div(&pair_curve(s, &h, &g.class_coords)?)? == *value,
                        None => false,
                    };
                    if !ok {
                        bad.push(format!("{id}: ratio at {minimizer}"));
                    }
                }
                Witness::Seshadri { value, minimizer } => {
                    let ok = match s.curve_catalog().iter().find(|c| &c.label == minimizer) {
                        Some(c) => {
                            pair_curve(s, &coords, &c.class_coords)?
                                .scale_rational(&BigRational::new(1.into(), c.multiplicity.into()))
                                == *value
                        }
                        None => false,
                    };
                    if !ok {
                        bad.push(format!("{id}: Seshadri ratio at {minimizer}"));
                    }
                }
                _ => {}
            }
        }
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> RDivisor {
        RDivisor::parse(s).unwrap()
    }

    fn report(s: &SurfaceModel, text: &str) -> PositivityReport {
        check(s, &d(text), &EvalOptions::new(s)).unwrap()
    }

    #[test]
    fn boundary_example_report() {
        let f2 = SurfaceModel::hirzebruch(2).unwrap();
        let r = report(&f2, "3/2*C0 + 3*f");
        assert!(!r.ground_truth);
        assert!(r.verdicts["P1"].holds);
        match &r.verdicts["P1"].witness {
            Witness::Runs { runs } => assert_eq!(runs[0].scan_first, Some(1)),
            w => panic!("{w:?}"),
        }
        for id in AMPLE_RATIONAL {
            let v = &r.verdicts[id];
            assert!(!v.holds, "{id}");
            assert!(v.conclusive, "{id}");
        }
        assert!(r.big);
        assert!(r.recheck(&f2).unwrap().is_empty());
    }

    #[test]
    fn ample_report_agrees_everywhere() {
        let f2 = SurfaceModel::hirzebruch(2).unwrap();
        let r = report(&f2, "C0 + 3*f");
        for (id, v) in &r.verdicts {
            assert!(v.holds, "{id}");
            assert!(v.conclusive, "{id}");
        }
        let p2 = SurfaceModel::projective_plane();
        let r = report(&p2, "-1/2*L");
        for (id, v) in &r.verdicts {
            assert!(!v.holds, "{id}");
        }
    }

    #[test]
    fn boundary_ray_not_big_anywhere() {
        let f2 = SurfaceModel::hirzebruch(2).unwrap();
        let r = report(&f2, "f");
        for id in BIG {
            assert!(!r.verdicts[id].holds, "{id}");
            assert!(r.verdicts[id].conclusive, "{id}");
        }
    }

    #[test]
    fn literal_catalog_misses_boundary_vanishing() {
        let f2 = SurfaceModel::hirzebruch(2).unwrap();
        let mut opts = EvalOptions::new(&f2);
        let r = check(&f2, &d("f"), &opts).unwrap();
        assert!(!r.verdicts["QI"].holds);
        // With only the single twists, f looks like it satisfies vanishing.
        opts.twists = vec![ZDivisor::zero(2), ZDivisor::new(vec![-1, 0]), ZDivisor::new(vec![0, -1]), ZDivisor::new(vec![-1, -1])];
        let ctx = Context::new(&f2, &d("f"), 200, 20_000).unwrap();
        for t in &opts.twists {
            assert!(ctx.oracle(Predicate::Vanishing, t).unwrap().exact().unwrap().from.is_some(), "{t}");
        }
    }

    #[test]
    fn json_round_trip() {
        let f2 = SurfaceModel::hirzebruch(2).unwrap();
        for text in ["3/2*C0 + 3*f", "sqrt(2)*C0 + 3*f", "-C0 + 1/3*f"] {
            let r = report(&f2, text);
            assert_eq!(PositivityReport::from_json(&r.to_json()).unwrap(), r);
        }
    }

    #[test]
    fn faults_change_verdicts() {
        let f2 = SurfaceModel::hirzebruch(2).unwrap();
        let mut opts = EvalOptions::new(&f2);
        opts.fault = Some(Fault::NakaiSelfIntersectionOnly);
        assert!(check(&f2, &d("-C0 - 3*f"), &opts).unwrap().verdicts["QVI"].holds);
        opts.fault = Some(Fault::SeshadriSkipsFirstCurve);
        assert!(check(&f2, &d("C0 + f"), &opts).unwrap().verdicts["QVII"].holds);
        opts.fault = Some(Fault::FlipConeOracle);
        assert!(!check(&f2, &d("C0 + 3*f"), &opts).unwrap().verdicts["QIX"].holds);
    }
}
