use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use floorcone::auditor::{
    audit_all, audit_ampleness, audit_bigness, audit_nef_from_multiples, replicate_boundary_example, AuditConfig,
    AuditOutcome, CoefficientProfile,
};
use floorcone::divisor::DivisorSpec;
use floorcone::exact_numbers::parse_rational;
use floorcone::positivity::{big_growth_check, check, chi_growth, h0_growth, semigroup, EvalOptions};
use floorcone::{Error, QuadExt, RDivisor, SurfaceModel};

const SCHEMA: &str = "v1";

#[derive(Parser)]
#[command(name = "floorcone", version, about = "Exact ample, nef and big tests for Q- and R-divisors on surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Args)]
struct Target {
    /// Builtin id (`hirzebruch:E`, `p2`) or surface file.
    #[arg(long)]
    surface: String,
    /// Inline divisor such as `3/2*C0 + 3*f`, or a divisor file.
    #[arg(long)]
    divisor: String,
    #[arg(long, env = "FLOORCONE_M_MAX", default_value_t = 200)]
    m_max: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    All,
    Ampleness,
    Bigness,
    NefFromMultiples,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Rational,
    Quadratic,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every criterion on one divisor.
    Check {
        #[command(flatten)]
        target: Target,
        /// Neighborhood radius for the open-cone criterion.
        #[arg(long, default_value = "1/1000", allow_hyphen_values = true)]
        delta: String,
    },
    /// Seeded cross-check of the criteria on random divisors.
    Audit {
        /// Config file; the remaining flags are ignored when given.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long = "surface", default_values_t = ["hirzebruch:2".to_string(), "p2".to_string()])]
        surfaces: Vec<String>,
        #[arg(long, default_value_t = 200)]
        n_divisors: usize,
        #[arg(long, value_enum, default_value_t = Profile::Rational)]
        profile: Profile,
        #[arg(long, default_value_t = 30)]
        max_num: i64,
        #[arg(long, default_value_t = 12)]
        max_den: i64,
        /// Radicand for the quadratic profile.
        #[arg(long, default_value_t = 2)]
        radicand: u64,
        #[arg(long, default_value_t = 10)]
        height: i64,
        #[arg(long, env = "FLOORCONE_M_MAX", default_value_t = 200)]
        m_max: u64,
        #[arg(long, default_value = "1/1000", allow_hyphen_values = true)]
        delta: String,
    },
    /// The non-ample divisor with very ample integral part on F_e.
    Counterexample {
        #[arg(long = "e", value_delimiter = ',', default_values_t = [2i64, 3, 4])]
        e: Vec<i64>,
    },
    /// Multiples m <= m_max with a nonzero section of [mD].
    Semigroup {
        #[command(flatten)]
        target: Target,
    },
    /// chi([mD]) and h0([mD]) for m = 1..m_max.
    Growth {
        #[command(flatten)]
        target: Target,
    },
}

/// Outcome of a command: rendered text and whether it found problems.
struct Rendered {
    human: String,
    json: serde_json::Value,
    clean: bool,
}

fn field_error(field: &str, e: Error) -> Error {
    match e {
        Error::Parse { .. } | Error::Config { .. } => e,
        other => Error::config(field, other.to_string()),
    }
}

fn load_surface(arg: &str) -> Result<SurfaceModel, Error> {
    SurfaceModel::load(arg).map_err(|e| match e {
        Error::Parse { message, .. } | Error::Config { message, .. } => Error::config("surface", message),
        other => Error::config("surface", other.to_string()),
    })
}

fn load_divisor(arg: &str) -> Result<RDivisor, Error> {
    let spec = if Path::new(arg).is_file() {
        let text = fs::read_to_string(arg).map_err(|e| Error::config("divisor", format!("{arg}: {e}")))?;
        DivisorSpec::from_json(&text)?
    } else {
        DivisorSpec::Inline(arg.to_string())
    };
    spec.build().map_err(|e| field_error("divisor", e))
}

fn load_target(t: &Target) -> Result<(SurfaceModel, RDivisor), Error> {
    let s = load_surface(&t.surface)?;
    let d = load_divisor(&t.divisor)?;
    d.coords(&s).map_err(|e| field_error("divisor", e))?;
    Ok((s, d))
}

fn envelope(command: &str, result: impl Serialize) -> serde_json::Value {
    json!({ "schema": SCHEMA, "command": command, "result": result })
}

fn delta_arg(text: &str) -> Result<num_rational::BigRational, Error> {
    let d = parse_rational(text).map_err(|e| Error::config("delta", e.to_string()))?;
    if d <= num_rational::BigRational::from_integer(0.into()) {
        return Err(Error::config("delta", "must be positive"));
    }
    Ok(d)
}

fn run_check(t: &Target, delta: &str) -> Result<Rendered, Error> {
    let (s, d) = load_target(t)?;
    let mut opts = EvalOptions::new(&s);
    opts.m_max = t.m_max;
    opts.delta = delta_arg(delta)?;
    let report = check(&s, &d, &opts).map_err(|e| field_error("m_max", e))?;
    Ok(Rendered {
        human: report.to_human(&s),
        json: envelope("check", &report),
        clean: true,
    })
}

fn outcome_human(o: &AuditOutcome) -> String {
    let mut out = format!(
        "suites {} | seed {} | {} divisors | {} discrepancies | {} inconclusive\n",
        o.suites.join(","),
        o.seed,
        o.reports.len(),
        o.discrepancies.len(),
        o.inconclusive.len()
    );
    for d in &o.discrepancies {
        out += &format!("DISCREPANCY {}#{} {} {} vs {}: {}\n", d.surface, d.index, d.divisor, d.criteria.0, d.criteria.1, d.details);
    }
    for (name, r) in &o.replications {
        out += &format!("{:<40} {} {}\n", name, if r.passed { "pass" } else { "FAIL" }, r.details.join("; "));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn audit_config(
    config: &Option<PathBuf>,
    seed: u64,
    surfaces: &[String],
    n_divisors: usize,
    profile: Profile,
    max_num: i64,
    max_den: i64,
    radicand: u64,
    height: i64,
    m_max: u64,
    delta: &str,
) -> Result<AuditConfig, Error> {
    if let Some(path) = config {
        let text = fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        return AuditConfig::from_json(&text);
    }
    let profile = match profile {
        Profile::Rational => CoefficientProfile::Rational { max_num, max_den },
        Profile::Quadratic => CoefficientProfile::Quadratic { d: radicand, height, max_den },
    };
    let ids: Vec<&str> = surfaces.iter().map(String::as_str).collect();
    let mut c = AuditConfig::new(seed, &ids, n_divisors, profile);
    c.m_max = m_max;
    c.delta = delta.to_string();
    c.validate()?;
    Ok(c)
}

fn run_audit(config: &AuditConfig, suite: Suite) -> Result<Rendered, Error> {
    let o = match suite {
        Suite::All => audit_all(config)?,
        Suite::Ampleness => audit_ampleness(config)?,
        Suite::Bigness => audit_bigness(config)?,
        Suite::NefFromMultiples => audit_nef_from_multiples(config)?,
    };
    Ok(Rendered {
        human: outcome_human(&o),
        clean: o.is_clean(),
        json: envelope("audit", &o),
    })
}

fn run_counterexample(e: &[i64]) -> Result<Rendered, Error> {
    let r = replicate_boundary_example(e).map_err(|err| field_error("e", err))?;
    let mut human: String = r.rows.iter().map(|row| format!("{row}\n")).collect();
    human += if r.passed { "replicated\n" } else { "NOT replicated\n" };
    Ok(Rendered {
        human,
        clean: r.passed,
        json: envelope("counterexample", &r),
    })
}

fn set_text(members: &[u64]) -> String {
    if members.is_empty() {
        "∅".to_string()
    } else {
        format!("{{{}}}", members.iter().map(u64::to_string).collect::<Vec<_>>().join(", "))
    }
}

fn run_semigroup(t: &Target) -> Result<Rendered, Error> {
    let (s, d) = load_target(t)?;
    let g = semigroup(&s, &d, t.m_max).map_err(|e| field_error("m_max", e))?;
    let positive: Vec<u64> = g.members.iter().copied().filter(|&m| m > 0).collect();
    let human = format!(
        "N(X, D) ∩ [1, {}] = {}\nclosed under addition: {}\n",
        t.m_max,
        set_text(&positive),
        g.closed
    );
    let json = envelope(
        "semigroup",
        json!({
            "surface": s.name(),
            "divisor": d.to_string(),
            "m_max": t.m_max,
            "members": g.members,
            "positive_members": positive,
            "closed": g.closed,
        }),
    );
    Ok(Rendered { human, json, clean: true })
}

#[derive(Serialize)]
struct GrowthRow {
    m: u64,
    chi: i64,
    h0: u64,
}

fn run_growth(t: &Target) -> Result<Rendered, Error> {
    let (s, d) = load_target(t)?;
    if t.m_max < 1 {
        return Err(Error::config("m_max", "must be at least 1"));
    }
    let ms: Vec<u64> = (1..=t.m_max).collect();
    let chi = chi_growth(&s, &d, &ms)?;
    let h0 = h0_growth(&s, &d, &ms)?;
    let rows: Vec<GrowthRow> = chi
        .values
        .iter()
        .zip(&h0)
        .map(|(&(m, c), &(_, h))| GrowthRow { m, chi: c, h0: h })
        .collect();
    let check = if t.m_max >= 4 { Some(big_growth_check(&s, &d, t.m_max)?) } else { None };
    let mut human = format!("{:>6} {:>12} {:>12}\n", "m", "chi([mD])", "h0([mD])");
    for r in &rows {
        human += &format!("{:>6} {:>12} {:>12}\n", r.m, r.chi, r.h0);
    }
    let lead = |x: &Option<QuadExt>| x.as_ref().map_or("-".to_string(), |v| v.to_string());
    human += &format!("2 chi/m^2 at m_max: {}\n", lead(&chi.leading));
    if let Some(c) = &check {
        human += &format!("h0/m^2 at m_max: {} (D^2/2 = {}), growth test {}\n", c.leading, lead(&c.expected), if c.pass { "pass" } else { "fail" });
    }
    let json = envelope(
        "growth",
        json!({
            "surface": s.name(),
            "divisor": d.to_string(),
            "rows": rows,
            "chi_leading": chi.leading,
            "growth_check": check,
        }),
    );
    Ok(Rendered { human, json, clean: true })
}

fn dispatch(cli: &Cli) -> Result<Rendered, Error> {
    match &cli.command {
        Command::Check { target, delta } => run_check(target, delta),
        Command::Audit {
            config,
            suite,
            seed,
            surfaces,
            n_divisors,
            profile,
            max_num,
            max_den,
            radicand,
            height,
            m_max,
            delta,
        } => {
            let c = audit_config(config, *seed, surfaces, *n_divisors, *profile, *max_num, *max_den, *radicand, *height, *m_max, delta)?;
            run_audit(&c, *suite)
        }
        Command::Counterexample { e } => run_counterexample(e),
        Command::Semigroup { target } => run_semigroup(target),
        Command::Growth { target } => run_growth(target),
    }
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Internal(_) | Error::OracleUnavailable(_) => 1,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let rendered = match dispatch(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_for(&e));
        }
    };
    let text = match cli.format {
        Format::Human => rendered.human,
        Format::Json => serde_json::to_string_pretty(&rendered.json).expect("output serializes") + "\n",
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(if rendered.clean { 0 } else { 2 })
}
