//! Acceptance checks. One PASS/FAIL line per criterion; exits non-zero on any FAIL.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use floorcone::auditor::{
    ampleness_on, bigness_on, evaluate, nef_from_multiples_on, replicate_boundary_example, sample_divisors,
    AuditConfig, AuditOutcome, CoefficientProfile,
};
use floorcone::positivity::{h0_growth, intersect, is_ample_cone};
use floorcone::{weyl_find, QuadExt, RDivisor, SurfaceModel, ZDivisor};

struct Line {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn q(n: i64, d: i64) -> QuadExt {
    QuadExt::from_ratio(n, d)
}

fn inconclusive_list(out: &AuditOutcome) -> String {
    let v: Vec<String> = out.inconclusive.iter().map(|i| format!("{} on {}", i.criterion, i.divisor)).collect();
    if v.is_empty() {
        String::new()
    } else {
        format!(" [{}]", v.join(", "))
    }
}

fn summarize(out: &AuditOutcome, ids: &[&str]) -> (usize, usize, usize) {
    let listed = out
        .discrepancies
        .iter()
        .filter(|d| ids.contains(&d.criteria.0.as_str()))
        .count();
    let inconclusive = out
        .inconclusive
        .iter()
        .filter(|i| ids.contains(&i.criterion.as_str()))
        .count();
    (listed, out.discrepancies.len(), inconclusive)
}

fn boundary_example() -> Line {
    let (res, dt) = timed(|| -> floorcone::Result<(bool, String)> {
        let rep = replicate_boundary_example(&[2, 3, 4])?;
        let mut ok = rep.passed;
        let mut parts = Vec::new();
        for e in [2i64, 3, 4] {
            let s = SurfaceModel::hirzebruch(e)?;
            let d = RDivisor::prime([("C0", q(3, 2)), ("f", QuadExt::from_int(e + 1))])?;
            let floor = d.integral_part(&s)?;
            let va = s.very_ample(&floor)?;
            // D.C0 = (3/2)(-e) + (e + 1) computed by hand.
            let pairing = intersect(&s, &d, &RDivisor::parse("C0")?)?;
            let expected = q(2 - e, 2);
            let ample = is_ample_cone(&s, &d)?.holds;
            ok &= floor == ZDivisor::new(vec![1, e + 1]) && va && pairing == expected && !ample;
            parts.push(format!("e={e}: D.C0={pairing} va={va} ample={ample}"));
        }
        Ok((ok, parts.join("; ")))
    });
    let (ok, detail) = res.unwrap_or_else(|e| (false, e.to_string()));
    let fast = dt < Duration::from_secs(1);
    Line {
        id: "1 boundary_example",
        passed: ok && fast,
        detail: format!("{detail}; {dt:.2?} (limit 1s)"),
    }
}

const AMPLE_IDS: [&str; 7] = ["QI", "QII", "QVI", "QVII", "QVIII", "QIX", "QX"];
const REAL_IDS: [&str; 6] = ["Ri", "Rii", "Riii", "Riv", "Rv", "Rvi"];
const BIG_IDS: [&str; 8] = ["B1", "B2", "B3", "B4", "B5", "B6", "B7", "BK"];

fn analytic_h0(s: &SurfaceModel, z: &ZDivisor) -> u64 {
    match s.hirzebruch_index() {
        Some(e) => {
            let (a, b) = (z.coords()[0], z.coords()[1]);
            if a < 0 {
                return 0;
            }
            (0..=a).map(|i| (b - i * e as i64 + 1).max(0) as u64).sum()
        }
        None => {
            let d = z.coords()[0];
            if d < 0 {
                0
            } else {
                ((d + 1) * (d + 2) / 2) as u64
            }
        }
    }
}

fn analytic_chi(s: &SurfaceModel, z: &ZDivisor) -> i64 {
    match s.hirzebruch_index() {
        Some(e) => {
            let e = e as i64;
            let (a, b) = (z.coords()[0], z.coords()[1]);
            let dd = -e * a * a + 2 * a * b;
            let dk = (e - 2) * a - 2 * b;
            1 + (dd - dk) / 2
        }
        None => {
            let d = z.coords()[0];
            1 + (d * d + 3 * d) / 2
        }
    }
}

fn riemann_roch() -> Line {
    let (res, dt) = timed(|| -> floorcone::Result<(usize, Vec<String>)> {
        let mut cases = 0;
        let mut bad = Vec::new();
        let f2 = SurfaceModel::hirzebruch(2)?;
        let p2 = SurfaceModel::projective_plane();
        let mut check = |s: &SurfaceModel, z: ZDivisor| -> floorcone::Result<()> {
            cases += 1;
            let c = s.cohomology(&z)?;
            let chi = analytic_chi(s, &z);
            let alt = c.h0 as i64 - c.h1 as i64 + c.h2 as i64;
            let h0_ok = c.h0 == analytic_h0(s, &z);
            let nef_ok = !s.is_nef_integral(&z) || (c.h1 == 0 && c.h2 == 0);
            if alt != chi || s.chi(&z) != chi || !h0_ok || !nef_ok {
                bad.push(format!("{}: {:?} chi={chi}", z.format_with(s.basis()), c));
            }
            Ok(())
        };
        for a in -20..=20 {
            for b in -20..=20 {
                check(&f2, ZDivisor::new(vec![a, b]))?;
            }
        }
        for d in -20..=20 {
            check(&p2, ZDivisor::new(vec![d]))?;
        }
        Ok((cases, bad))
    });
    match res {
        Ok((cases, bad)) => Line {
            id: "5 riemann_roch",
            passed: bad.is_empty() && dt < Duration::from_secs(5),
            detail: format!("{cases} classes, {} mismatches {:?}; {dt:.2?} (limit 5s)", bad.len(), bad.first()),
        },
        Err(e) => Line { id: "5 riemann_roch", passed: false, detail: e.to_string() },
    }
}

fn big_growth() -> Line {
    let res = (|| -> floorcone::Result<(bool, String)> {
        let s = SurfaceModel::hirzebruch(2)?;
        let d = RDivisor::parse("C0 + 3*f")?;
        let ms: Vec<u64> = (1..=100).collect();
        let values = h0_growth(&s, &d, &ms)?;
        let exact = values.iter().all(|&(m, h)| h == (m + 1) * (2 * m + 1));
        let (m, h) = values[99];
        let ratio = BigRational::new(BigInt::from(h), BigInt::from(m * m));
        let lo = BigRational::from_integer(2.into());
        let hi = &lo + BigRational::new(4.into(), BigInt::from(m));
        let in_range = ratio >= lo && ratio <= hi;
        Ok((exact && in_range, format!("h0(100D)={h}, h0/m^2={ratio} in [2, {hi}]: {in_range}, closed form for m<=100: {exact}")))
    })();
    let (passed, detail) = res.unwrap_or_else(|e| (false, e.to_string()));
    Line { id: "6 big_growth", passed, detail }
}

fn floor_rational(x: &BigRational) -> i64 {
    x.floor().to_integer().to_i64().unwrap()
}

fn decomposition_identities() -> Line {
    let res = (|| -> floorcone::Result<(bool, String)> {
        let s = SurfaceModel::hirzebruch(2)?;
        let profile = CoefficientProfile::Rational { max_num: 30, max_den: 12 };
        let divisors = sample_divisors(&s, &profile, 42, 7, 50);
        let mut failures = 0usize;
        for d in &divisors {
            let coords: Vec<BigRational> = d
                .coords(&s)?
                .iter()
                .map(|c| c.as_rational().unwrap().clone())
                .collect();
            let k = coords.iter().fold(BigInt::from(1), |acc, c| acc.lcm(c.denom())).to_u64().unwrap();
            let floor_at = |m: u64| -> Vec<i64> {
                coords
                    .iter()
                    .map(|c| floor_rational(&(c * BigRational::from_integer(BigInt::from(m)))))
                    .collect()
            };
            let kd = floor_at(k);
            for m in 1..=1000u64 {
                let dec = d.lemma_dr_decompose(&s, m)?;
                let lhs = floor_at(m);
                let id = floor_at(dec.i);
                let rhs: Vec<i64> = kd.iter().zip(&id).map(|(a, b)| dec.t as i64 * a + b).collect();
                if dec.k != k || dec.t * k + dec.i != m || dec.i >= k || lhs != rhs {
                    failures += 1;
                }
            }
        }
        let worked = RDivisor::general([("A", q(1, 2), vec![1, 1]), ("B", q(1, 2), vec![1, 2])])?;
        let tm = worked.enumerate_tm(&s, 1000)?;
        let expected: BTreeSet<ZDivisor> = [ZDivisor::zero(2), ZDivisor::new(vec![1, 1])].into_iter().collect();
        let tm_ok = tm.observed == expected;
        let mut bounds_ok = tm.observed.iter().all(|t| tm.within_bounds(t));
        // Signed expansions too.
        let signed = RDivisor::general([
            ("A", q(5, 7), vec![1, -1]),
            ("B", q(-2, 3), vec![2, 1]),
            ("C", q(1, 4), vec![0, 3]),
        ])?;
        let tm2 = signed.enumerate_tm(&s, 400)?;
        bounds_ok &= tm2.observed.iter().all(|t| tm2.within_bounds(t));
        Ok((
            failures == 0 && tm_ok && bounds_ok,
            format!(
                "{} divisors x m<=1000, {failures} identity failures; T_m = {{{}}} (expected {{0, C0+f}}); within bounds: {bounds_ok}",
                divisors.len(),
                tm.observed.iter().map(|t| t.format_with(s.basis())).collect::<Vec<_>>().join(", ")
            ),
        ))
    })();
    let (passed, detail) = res.unwrap_or_else(|e| (false, e.to_string()));
    Line { id: "8 decomposition_identities", passed, detail }
}

/// `frac(k sqrt 2) < 1/n` by integer arithmetic.
fn sqrt2_frac_below(k: u64, n: u64) -> bool {
    let k = k as u128;
    let n = n as u128;
    let fl = (2 * k * k).isqrt();
    // n k sqrt2 < n fl + 1
    2 * n * n * k * k < (n * fl + 1) * (n * fl + 1)
}

fn weyl_search() -> Line {
    let res = (|| -> floorcone::Result<(bool, String)> {
        let alpha = QuadExt::sqrt_times(BigRational::from_integer(1.into()), 2);
        let k10 = weyl_find(&alpha, &BigRational::new(1.into(), 10.into()), 1)?;
        let least10 = (1..k10).all(|k| !sqrt2_frac_below(k, 10)) && sqrt2_frac_below(k10, 10);
        let k100 = weyl_find(&alpha, &BigRational::new(1.into(), 100.into()), 1)?;
        let least100 = (1..k100).all(|k| !sqrt2_frac_below(k, 100)) && sqrt2_frac_below(k100, 100);
        Ok((
            k10 == 5 && least10 && k100 <= 10_000 && least100,
            format!("eps=1/10: k={k10} (least: {least10}); eps=1/100: k={k100} (least: {least100})"),
        ))
    })();
    let (passed, detail) = res.unwrap_or_else(|e| (false, e.to_string()));
    Line { id: "9 weyl_search", passed, detail }
}

fn audits(lines: &mut Vec<Line>) {
    let surfaces = ["hirzebruch:2", "p2"];
    let rational = AuditConfig::new(42, &surfaces, 200, CoefficientProfile::Rational { max_num: 30, max_den: 12 });
    let quadratic = AuditConfig::new(42, &surfaces, 50, CoefficientProfile::Quadratic { d: 2, height: 10, max_den: 6 });

    let (res, dt) = timed(|| {
        let (s, x) = evaluate(&rational, None)?;
        let out = ampleness_on(&rational, &s, &x)?;
        Ok::<_, floorcone::Error>((s, x, out))
    });
    let (rs, rx) = match res {
        Ok((s, x, out)) => {
            let (listed, total, inc) = summarize(&out, &AMPLE_IDS);
            lines.push(Line {
                id: "2 rational_ampleness_audit",
                passed: total == 0 && dt < Duration::from_secs(60),
                detail: format!("{} divisors, {listed} listed discrepancies ({total} total), {inc} inconclusive{}; {dt:.2?} (limit 60s)", x.len(), inconclusive_list(&out)),
            });
            (s, x)
        }
        Err(e) => {
            lines.push(Line { id: "2 rational_ampleness_audit", passed: false, detail: e.to_string() });
            return;
        }
    };

    match nef_from_multiples_on(&rational, &rs, &rx) {
        Ok(out) => {
            let ok = out.is_clean();
            let sel = out.replications.get("nef_from_multiples").map(|r| r.details.join(" ")).unwrap_or_default();
            lines.push(Line {
                id: "4 nef_from_multiples",
                passed: ok,
                detail: format!("{sel}, {} violations", out.discrepancies.len()),
            });
        }
        Err(e) => lines.push(Line { id: "4 nef_from_multiples", passed: false, detail: e.to_string() }),
    }

    let (res, dt) = timed(|| {
        let (s, x) = evaluate(&quadratic, None)?;
        let out = ampleness_on(&quadratic, &s, &x)?;
        Ok::<_, floorcone::Error>((s, x, out))
    });
    let (qs, qx) = match res {
        Ok((s, x, out)) => {
            let (listed, total, inc) = summarize(&out, &REAL_IDS);
            lines.push(Line {
                id: "3 real_ampleness_audit",
                passed: total == 0 && dt < Duration::from_secs(60),
                detail: format!("{} divisors over Q(sqrt 2), {listed} listed discrepancies ({total} total), {inc} inconclusive{}; {dt:.2?} (limit 60s)", x.len(), inconclusive_list(&out)),
            });
            (s, x)
        }
        Err(e) => {
            lines.push(Line { id: "3 real_ampleness_audit", passed: false, detail: e.to_string() });
            return;
        }
    };

    let big = bigness_on(&rational, &rs, &rx).and_then(|a| Ok((a, bigness_on(&quadratic, &qs, &qx)?)));
    match big {
        Ok((a, b)) => {
            let (la, ta, ia) = summarize(&a, &BIG_IDS);
            let (lb, tb, ib) = summarize(&b, &BIG_IDS);
            let spot = a.replications["big_plus_effective"].passed && b.replications["big_plus_effective"].passed;
            lines.push(Line {
                id: "7 bigness_audit",
                passed: ta == 0 && tb == 0 && spot,
                detail: format!(
                    "rational {} divisors: {la} listed ({ta} total) discrepancies, {ia} inconclusive; quadratic {}: {lb} ({tb}), {ib} inconclusive; big_plus_effective: {spot}",
                    rx.len(),
                    qx.len()
                ),
            });
        }
        Err(e) => lines.push(Line { id: "7 bigness_audit", passed: false, detail: e.to_string() }),
    }
}

fn main() {
    // `cargo test` passes harness flags; a filter that names nothing here skips the run.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if args.iter().any(|a| !"acceptance".contains(a.as_str())) {
        return;
    }
    let mut lines = vec![boundary_example()];
    audits(&mut lines);
    lines.push(riemann_roch());
    lines.push(big_growth());
    lines.push(decomposition_identities());
    lines.push(weyl_search());
    lines.sort_by_key(|l| l.id.split(' ').next().unwrap().parse::<u32>().unwrap());
    let mut failed = 0;
    for l in &lines {
        println!("{} {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.id, l.detail);
        if !l.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
