mod problem;
mod report;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use log::debug;
use num_bigint::BigInt;
use num_rational::BigRational;
use onesided::decision::{decide, verify_failure_certificate, Verdict};
use onesided::density::{classify_line_group, property_a, PropertyA};
use onesided::face::{smallest_face, z_set_empty};
use onesided::ordered::{
    check_convex_sufficient, check_pure, critical_refinable, unperforation_verdict, verify_perforation, Convexity,
    OrderedGroupSpec, Refinability, Unperforation,
};
use onesided::simplex::{farkas, gordan};
use onesided::witness::{construct_witness, WitnessError, WitnessSearch};
use onesided::{field, par, Error};
use problem::{InputError, Parsed, Problem};
use serde_json::{json, Map, Value};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 2;
const EXIT_FAILS: u8 = 3;
const EXIT_BUDGET: u8 = 4;

/// Exact decisions about one-sided approximation in subgroups of ℝⁿ.
#[derive(Parser)]
#[command(name = "onesided", version)]
struct Cli {
    /// Worker threads; 1 runs every computation sequentially.
    #[arg(long, default_value_t = 1, global = true)]
    threads: usize,
    /// Log LP pivots and search progress to stderr.
    #[arg(long, global = true)]
    trace_steps: bool,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Problem file, or `-` for stdin.
    file: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Decide property (B) for H and print both routes and any certificate.
    Decide(Input),
    /// Find h′ with h − m·h′ ≥ −ε·u.
    Witness(WitnessArgs),
    /// Smallest face containing the traces that vanish on H.
    Face(Input),
    /// Classify τ(H) ⊂ ℝ for the supplied trace.
    Density(Input),
    /// Is H dense in its real span?
    PropertyA(Input),
    /// Gordan alternative for `matrix`.
    Gordan(Input),
    /// Farkas alternative for `matrix` and `vector`.
    Farkas(Input),
    /// Purity, convexity and unperforation of G/H.
    Unperforated(UnperforatedArgs),
    /// Refinability of a trace on a critical group.
    Refinable(Input),
    /// Re-verify a failure certificate exactly.
    VerifyCert(VerifyArgs),
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    input: Input,
    /// Coefficients of h over H's generators, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    h: Option<Vec<BigInt>>,
    #[arg(long)]
    m: Option<BigInt>,
    /// Rational tolerance such as `1/100`.
    #[arg(long)]
    epsilon: Option<BigRational>,
    /// Largest enumeration box radius.
    #[arg(long)]
    budget: Option<u64>,
    /// Skip the lattice-guided tier.
    #[arg(long)]
    no_structured: bool,
}

#[derive(Args)]
struct UnperforatedArgs {
    #[command(flatten)]
    input: Input,
    /// Treat H as convex without checking.
    #[arg(long)]
    assume_convex: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    /// Report or bare certificate; defaults to `certificate` in the problem file.
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Candidates h′ range over coefficient boxes of this radius.
    #[arg(long, default_value_t = 2)]
    radius: u32,
    /// Moduli to check, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
    moduli: Vec<BigInt>,
}

struct Outcome {
    report: Map<String, Value>,
    code: u8,
}

impl Outcome {
    fn new(code: u8, report: Value) -> Self {
        let Value::Object(report) = report else {
            unreachable!("reports are objects")
        };
        Outcome { report, code }
    }
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(input: &Input) -> Parsed<Problem> {
    let text = read_text(&input.file).map_err(|e| InputError {
        path: String::new(),
        kind: "Io".into(),
        message: format!("{e:#}"),
    })?;
    Problem::parse(&text)
}

fn engine(path: &str) -> impl Fn(Error) -> InputError + '_ {
    move |e| InputError::from_error(path, &e)
}

fn run_decide(p: &Problem) -> Parsed<Outcome> {
    let (h, unit) = (p.h()?, p.unit()?);
    let out = decide(&h, &unit).map_err(engine("/generators_H"))?;
    let code = if out.verdict == Verdict::HoldsB { EXIT_OK } else { EXIT_FAILS };
    Ok(Outcome::new(code, report::decision(&out)))
}

fn run_witness(p: &Problem, a: &WitnessArgs) -> Parsed<Outcome> {
    let (h, unit) = (p.h()?, p.unit()?);
    let h_coeffs = match &a.h {
        Some(v) => v.clone(),
        None => {
            let v = p.get("h").ok_or_else(|| InputError::new("/h", "missing `h` (or pass --h)"))?;
            p.int_vec(v, "/h", None)?
        }
    };
    if h_coeffs.len() != h.num_generators() {
        return Err(InputError::new(
            "/h",
            format!("{} coefficients for {} generators", h_coeffs.len(), h.num_generators()),
        ));
    }
    let m = p.integer_param(a.m.as_ref(), "m", Some(2))?;
    let eps = p.rational_param(a.epsilon.as_ref(), "epsilon", Some((1, 10)))?;
    let budget = match a.budget {
        Some(b) => b,
        None => match p.get("budget") {
            Some(v) => v.as_u64().ok_or_else(|| InputError::new("/budget", "expected a nonnegative integer"))?,
            None => WitnessSearch::default().budget,
        },
    };
    let search = WitnessSearch {
        budget,
        structured: !a.no_structured,
    };
    let base = json!({ "m": report::int(&m), "epsilon": report::rational(&eps), "budget": budget });
    let mut out = match construct_witness(&h, &unit, &h_coeffs, &m, &eps, search) {
        Ok(w) => Outcome::new(EXIT_OK, json!({ "status": "Found", "witness": report::witness(&w) })),
        Err(WitnessError::NoWitnessExists(cert)) => Outcome::new(
            EXIT_FAILS,
            json!({ "status": "NoWitnessExists", "certificate": report::certificate(&cert) }),
        ),
        Err(WitnessError::BudgetExhausted { radius }) => {
            Outcome::new(EXIT_BUDGET, json!({ "status": "BudgetExhausted", "radius": radius }))
        }
        Err(WitnessError::BadParameters) => return Err(InputError::new("/m", WitnessError::BadParameters.to_string())),
        Err(WitnessError::Engine(e)) => return Err(engine("/generators_H")(e)),
    };
    out.report.insert("parameters".into(), base);
    Ok(out)
}

fn run_face(p: &Problem) -> Parsed<Outcome> {
    let (h, unit) = (p.h()?, p.unit()?);
    let z = z_set_empty(&h, &unit).map_err(engine("/generators_H"))?;
    let f = smallest_face(&h, &unit).map_err(engine("/generators_H"))?;
    Ok(Outcome::new(EXIT_OK, json!({ "z_set": report::z_set(&z), "face": report::face(&f) })))
}

fn run_density(p: &Problem) -> Parsed<Outcome> {
    let h = p.h()?;
    let tau = p.trace(h.ambient_dim())?;
    let values: Vec<_> = h.generators().iter().map(|g| field::dot(&tau, g)).collect();
    let class = classify_line_group(&p.ctx, &values);
    Ok(Outcome::new(
        EXIT_OK,
        json!({ "values": report::scalars(&values), "classification": report::line_group(&class) }),
    ))
}

fn run_property_a(p: &Problem) -> Parsed<Outcome> {
    let result = property_a(&p.h()?);
    let code = if matches!(result, PropertyA::Holds) { EXIT_OK } else { EXIT_FAILS };
    Ok(Outcome::new(code, report::property_a(&result)))
}

fn run_gordan(p: &Problem) -> Parsed<Outcome> {
    let a = p.matrix()?;
    let result = gordan(&a);
    let mut out = Outcome::new(EXIT_OK, report::gordan(&result));
    out.report.insert("verified".into(), result.verify(&a).into());
    Ok(out)
}

fn run_farkas(p: &Problem) -> Parsed<Outcome> {
    let a = p.matrix()?;
    let b = p.vector(a.ncols())?;
    let result = farkas(&a, &b).map_err(|e| InputError::from_error("/vector", &e))?;
    let mut out = Outcome::new(EXIT_OK, report::farkas(&result));
    out.report.insert("verified".into(), result.verify(&a, &b).into());
    Ok(out)
}

fn ordered_spec(p: &Problem) -> Parsed<OrderedGroupSpec> {
    OrderedGroupSpec::new(p.g()?, p.ordering()?, p.unit()?).map_err(engine("/generators_G"))
}

fn run_unperforated(p: &Problem, a: &UnperforatedArgs) -> Parsed<Outcome> {
    let spec = ordered_spec(p)?;
    let h_in_g = p.h_in_g(spec.g.num_generators())?;
    let h = spec.subgroup(&h_in_g).map_err(engine("/H_in_G"))?;
    let purity = check_pure(&spec, &h_in_g).map_err(engine("/generators_G"))?;
    let convexity = check_convex_sufficient(&spec, &h).map_err(engine("/H_in_G"))?;
    let convexity = match convexity {
        Convexity::ConvexByTrivialIntersection => "ConvexByTrivialIntersection",
        Convexity::Unknown => "Unknown",
    };
    let mut body = json!({ "purity": report::purity(&purity), "convexity": convexity });
    let code = match unperforation_verdict(&spec, &h_in_g, a.assume_convex) {
        Ok(rep) => {
            let code = match &rep.verdict {
                Unperforation::Unperforated => EXIT_OK,
                Unperforation::Perforated { certificate, instance } => {
                    let ok = instance
                        .as_ref()
                        .map(|i| verify_perforation(&spec, &h, certificate, i));
                    body["instance_verified"] = json!(ok);
                    EXIT_FAILS
                }
            };
            body["unperforation"] = report::unperforation(&rep.verdict);
            body["convexity_assumed"] = rep.convexity_assumed.into();
            code
        }
        Err(e @ (Error::NotPure { .. } | Error::ConvexityNotEstablished)) => {
            body["unperforation"] = json!({ "status": "Undetermined", "reason": e.to_string() });
            EXIT_OK
        }
        Err(e) => return Err(engine("/ordering")(e)),
    };
    Ok(Outcome::new(code, body))
}

fn run_refinable(p: &Problem) -> Parsed<Outcome> {
    let spec = ordered_spec(p)?;
    let tau = p.trace(spec.g.ambient_dim())?;
    let (result, normalized) = critical_refinable(&spec, &tau).map_err(|e| match e {
        Error::InvalidTrace(_) => InputError::from_error("/trace", &e),
        other => InputError::from_error("/generators_G", &other),
    })?;
    let code = if matches!(result, Refinability::Refinable) { EXIT_OK } else { EXIT_FAILS };
    let mut out = Outcome::new(code, report::refinability(&result));
    out.report.insert("trace".into(), report::trace(&normalized));
    Ok(out)
}

/// Coefficient vectors in `[-r, r]^s`, in lexicographic order.
fn coefficient_box(s: usize, r: u32) -> Vec<Vec<BigInt>> {
    let r = i64::from(r);
    let mut out = vec![Vec::new()];
    for _ in 0..s {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<BigInt>| {
                (-r..=r).map(move |c| {
                    let mut v = prefix.clone();
                    v.push(BigInt::from(c));
                    v
                })
            })
            .collect();
    }
    out
}

const MAX_CANDIDATES: u64 = 1_000_000;

fn run_verify(p: &Problem, a: &VerifyArgs) -> Parsed<Outcome> {
    let (h, unit) = (p.h()?, p.unit()?);
    let doc = match &a.certificate {
        Some(path) => {
            let text = read_text(path).map_err(|e| InputError {
                path: String::new(),
                kind: "Io".into(),
                message: format!("{e:#}"),
            })?;
            Some(serde_json::from_str::<Value>(&text).map_err(|e| InputError {
                path: String::new(),
                kind: "MalformedJson".into(),
                message: format!("certificate file: {e}"),
            })?)
        }
        None => None,
    };
    let cert = p.certificate(doc.as_ref())?;
    let count = (2 * u64::from(a.radius) + 1).checked_pow(h.num_generators() as u32);
    if count.is_none_or(|c| c > MAX_CANDIDATES) {
        return Err(InputError::new("", "candidate box too large; lower --radius"));
    }
    let candidates = coefficient_box(h.num_generators(), a.radius);
    let mut defect = None;
    for m in &a.moduli {
        if let Err(d) = verify_failure_certificate(&h, &unit, &cert, &candidates, m) {
            defect = Some(json!({ "m": report::int(m), "defect": d.to_string() }));
            break;
        }
    }
    let valid = defect.is_none();
    Ok(Outcome::new(
        if valid { EXIT_OK } else { EXIT_FAILS },
        json!({
            "valid": valid,
            "defect": defect,
            "candidates": candidates.len(),
            "radius": a.radius,
            "moduli": report::ints(&a.moduli),
        }),
    ))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Decide(_) => "decide",
        Command::Witness(_) => "witness",
        Command::Face(_) => "face",
        Command::Density(_) => "density",
        Command::PropertyA(_) => "property-a",
        Command::Gordan(_) => "gordan",
        Command::Farkas(_) => "farkas",
        Command::Unperforated(_) => "unperforated",
        Command::Refinable(_) => "refinable",
        Command::VerifyCert(_) => "verify-cert",
    }
}

fn dispatch(cmd: &Command) -> Parsed<Outcome> {
    let input = match cmd {
        Command::Decide(i)
        | Command::Face(i)
        | Command::Density(i)
        | Command::PropertyA(i)
        | Command::Gordan(i)
        | Command::Farkas(i)
        | Command::Refinable(i) => i,
        Command::Witness(a) => &a.input,
        Command::Unperforated(a) => &a.input,
        Command::VerifyCert(a) => &a.input,
    };
    let p = load(input)?;
    debug!("field of degree {}", p.ctx.degree());
    match cmd {
        Command::Decide(_) => run_decide(&p),
        Command::Witness(a) => run_witness(&p, a),
        Command::Face(_) => run_face(&p),
        Command::Density(_) => run_density(&p),
        Command::PropertyA(_) => run_property_a(&p),
        Command::Gordan(_) => run_gordan(&p),
        Command::Farkas(_) => run_farkas(&p),
        Command::Unperforated(a) => run_unperforated(&p, a),
        Command::Refinable(_) => run_refinable(&p),
        Command::VerifyCert(a) => run_verify(&p, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.trace_steps { "trace" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if cli.threads > 1 {
        // read by rayon when its global pool is first built
        std::env::set_var("RAYON_NUM_THREADS", cli.threads.to_string());
    }
    par::set_enabled(cli.threads > 1);

    let start = Instant::now();
    let result = dispatch(&cli.command);
    let elapsed = start.elapsed();

    let mut report = Map::new();
    report.insert("command".into(), command_name(&cli.command).into());
    let code = match result {
        Ok(out) => {
            report.extend(out.report);
            out.code
        }
        Err(e) => {
            eprintln!("error at `{}`: {}", e.path, e.message);
            report.insert(
                "error".into(),
                json!({ "kind": e.kind, "path": e.path, "message": e.message }),
            );
            EXIT_INPUT
        }
    };
    if cli.timing {
        report.insert("timing".into(), json!({ "elapsed_ms": elapsed.as_secs_f64() * 1e3 }));
    }
    let text = serde_json::to_string_pretty(&Value::Object(report)).expect("reports serialize");
    // a closed pipe is the reader's choice, not an error of ours
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(code)
}
