//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 domain or resource violation,
//! 3 verification failure or internal inconsistency.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::roots_of_unity;
use crate::dynamics::{
    birkhoff_average, conjugated_verdict, explore_boundary_perturbation, fixed_points,
    minimality_verdict, orbit, perturbed_analysis, sphere_partition, BirkhoffAverage,
    MonomialSystem, PerturbedSystem, Polynomial, TestFunction, Verdict, DEFAULT_K_MAX,
};
use crate::error::{Error, Result};
use crate::modarith::{checked_prime_power, gcd};
use crate::oracle::{
    verify_generation, verify_lemma1, verify_log_isometry, verify_theorem_minimal,
    verify_unique_invariance, Certificate, OracleCaps,
};
use crate::padic::PadicInt;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "padic-ergodic", version, about = "Ergodic properties of x -> x^n on p-adic spheres")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Also write the JSON document to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimality, unique ergodicity and ergodicity of x -> x^n on S_{p^-l}(1).
    Analyze(AnalyzeArgs),
    /// Orbit of a point and exact Birkhoff averages.
    Orbit(OrbitArgs),
    /// Exhaustive verification certificates.
    Verify(VerifyArgs),
    /// The perturbed map x -> x^n + q(x).
    Perturb(PerturbArgs),
    /// Roots of unity in Z_p.
    Roots(RootsArgs),
}

#[derive(Args, Debug)]
struct SystemArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    l: u32,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Deepest ball partition examined.
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    depth: u32,
    /// Working precision (default l + depth + 2).
    #[arg(long)]
    precision: Option<u32>,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Start point, as an integer residue.
    #[arg(long, allow_hyphen_values = true)]
    x0: i128,
    #[arg(long)]
    steps: u64,
    /// Ball indicators are tabulated for depths 1..=depth.
    #[arg(long, default_value_t = 1)]
    depth: u32,
    #[arg(long)]
    precision: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Claim {
    Lemma1,
    Generation,
    Minimal,
    Unique,
    LogIsometry,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    claim: Claim,
    /// Primes, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<u64>>,
    /// Levels l, comma separated (minimal, unique).
    #[arg(long, value_delimiter = ',')]
    l: Option<Vec<u32>>,
    /// Exponents n, comma separated (unique; default every unit mod p^2).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    /// Precision (lemma1, log-isometry).
    #[arg(long = "K")]
    precision: Option<u32>,
    #[arg(long)]
    n_max: Option<u64>,
    /// Partition depth (minimal: k_max, unique: k).
    #[arg(long)]
    depth: Option<u32>,
    /// Highest level for generation.
    #[arg(long)]
    l_max: Option<u32>,
    #[arg(long)]
    max_residues: Option<u64>,
    #[arg(long)]
    max_exponent: Option<u64>,
}

#[derive(Args, Debug)]
struct PerturbArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Coefficients of q, constant term first.
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    #[arg(long, default_value_t = 3)]
    depth: u32,
    /// Iterations N in the congruence check.
    #[arg(long, default_value_t = 6)]
    steps: u64,
    /// Accept coefficients of valuation l+1 and only tabulate observations.
    #[arg(long)]
    explore: bool,
}

#[derive(Args, Debug)]
struct RootsArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    d: u64,
    #[arg(long = "K", default_value_t = 4)]
    precision: u32,
}

#[derive(Serialize)]
struct Document<T: Serialize> {
    tool_version: &'static str,
    command: &'static str,
    parameters: Value,
    results: T,
}

struct Output {
    command: &'static str,
    parameters: Value,
    results: Value,
    text: String,
    failed: bool,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) => EXIT_USAGE,
        Error::Domain(_) | Error::Resource(_) | Error::Mismatch(_) => EXIT_DOMAIN,
        Error::Integrity(_) => EXIT_VERIFICATION,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return EXIT_DOMAIN;
        }
    };
    let result = pool.install(|| dispatch(&cli.command));
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };

    let doc = Document {
        tool_version: TOOL_VERSION,
        command: output.command,
        parameters: output.parameters,
        results: output.results,
    };
    let json = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, format!("{json}\n")) {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
            return EXIT_DOMAIN;
        }
    }
    let printed = match cli.format {
        Format::Json => writeln!(stdout, "{json}"),
        Format::Text => write!(stdout, "{}", output.text),
    };
    if printed.is_err() {
        return EXIT_DOMAIN;
    }
    if output.failed {
        EXIT_VERIFICATION
    } else {
        EXIT_OK
    }
}

fn dispatch(command: &Command) -> Result<Output> {
    match command {
        Command::Analyze(a) => analyze(a),
        Command::Orbit(a) => orbit_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Perturb(a) => perturb(a),
        Command::Roots(a) => roots(a),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports always serialize")
}

fn sphere_name(p: u64, l: u32) -> String {
    match checked_prime_power(p, l) {
        Ok(m) => format!("S_{{1/{m}}}(1)"),
        Err(_) => format!("S_{{{p}^-{l}}}(1)"),
    }
}

/// `"6"` for one cycle of length 6, `"1x2"` for two fixed points.
fn cycle_summary(lengths: &[usize]) -> String {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &len in lengths {
        *counts.entry(len).or_default() += 1;
    }
    counts
        .iter()
        .map(|(len, c)| if *c == 1 { len.to_string() } else { format!("{len}x{c}") })
        .collect::<Vec<_>>()
        .join(", ")
}

fn working_precision(l: u32, depth: u32, precision: Option<u32>) -> u32 {
    precision.unwrap_or(l + depth + 2)
}

#[derive(Serialize)]
struct FixedPointCheck {
    fixed_point: String,
    digits: String,
    conjugated_minimal: bool,
    matches_base: bool,
}

fn analyze(a: &AnalyzeArgs) -> Result<Output> {
    let SystemArgs { p, n, l } = a.system;
    let sys = MonomialSystem::new(p, n, l)?;
    let precision = working_precision(l, a.depth, a.precision);
    let verdict = minimality_verdict(&sys, a.depth)?;
    let fixed = fixed_points(&sys, precision)?;
    let checks = fixed
        .iter()
        .map(|fp| {
            let v = conjugated_verdict(&sys, fp, a.depth)?;
            Ok(FixedPointCheck {
                fixed_point: fp.residue().to_string(),
                digits: fp.to_string(),
                conjugated_minimal: v.minimal,
                matches_base: v.minimal == verdict.minimal,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let text = analyze_text(&sys, &verdict, &checks, precision);
    Ok(Output {
        command: "analyze",
        parameters: json!({ "p": p, "n": n, "l": l, "depth": a.depth, "precision": precision }),
        results: json!({ "verdict": to_value(&verdict), "fixed_points": to_value(&checks) }),
        text,
        failed: false,
    })
}

fn analyze_text(
    sys: &MonomialSystem,
    v: &Verdict,
    checks: &[FixedPointCheck],
    precision: u32,
) -> String {
    let e = &v.evidence;
    let (p, n) = (sys.p(), sys.n());
    let mut s = String::new();
    let _ = writeln!(
        s,
        "x -> x^{n} on {} in Z_{p}, depths 1..={}",
        sphere_name(p, sys.l()),
        e.levels.len()
    );
    let _ = writeln!(s, "minimal: {}", v.minimal);
    let _ = writeln!(s, "uniquely ergodic: {}", v.uniquely_ergodic);
    let _ = writeln!(s, "ergodic: {}", v.ergodic);
    let _ = writeln!(
        s,
        "generator of G_{}: {} (order of {n} mod {} is {} of {})",
        p * p,
        e.generator_of_g_p2,
        p * p,
        e.order_mod_p2,
        e.group_order_p2
    );
    let set = &e.generated_set_mod_p2;
    let shown: Vec<String> = set.iter().take(24).map(u64::to_string).collect();
    let more = if set.len() > 24 { ", ..." } else { "" };
    let _ = writeln!(
        s,
        "<{n}> mod {} = {{{}{more}}} ({} elements)",
        p * p,
        shown.join(", "),
        set.len()
    );
    let _ = writeln!(s, "{:<6} {:<10} {:<24} {:<11} Haar measure per ball", "depth", "balls", "cycle lengths", "transitive");
    for lv in &e.levels {
        let _ = writeln!(
            s,
            "{:<6} {:<10} {:<24} {:<11} {}",
            lv.depth,
            lv.ball_count,
            cycle_summary(&lv.cycle_lengths),
            lv.transitive,
            lv.haar_ball_measure
        );
    }
    if !e.invariant_balls.is_empty() {
        let balls: Vec<String> = e.invariant_balls.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "invariant balls: {}", balls.join(", "));
    }
    let _ = writeln!(s, "fixed points (K = {precision}):");
    for c in checks {
        let _ = writeln!(
            s,
            "  {} = {}  conjugated sphere minimal: {} (matches: {})",
            c.fixed_point, c.digits, c.conjugated_minimal, c.matches_base
        );
    }
    s
}

fn orbit_cmd(a: &OrbitArgs) -> Result<Output> {
    let SystemArgs { p, n, l } = a.system;
    if a.steps == 0 {
        return Err(Error::usage("--steps must be positive"));
    }
    if a.depth == 0 {
        return Err(Error::usage("--depth must be positive"));
    }
    let sys = MonomialSystem::new(p, n, l)?;
    let precision = working_precision(l, a.depth, a.precision);
    let x0 = PadicInt::from_integer(a.x0, p, precision)?;
    let points = orbit(&sys, &x0, a.steps)?;

    let mut averages: Vec<BirkhoffAverage> = Vec::new();
    for depth in 1..=a.depth {
        for &center in sphere_partition(&sys, depth)?.representatives() {
            let f = TestFunction::BallIndicator { center, depth };
            averages.push(birkhoff_average(&sys, &x0, f, a.steps)?);
        }
    }
    for position in 0..precision {
        let f = TestFunction::Digit { position };
        averages.push(birkhoff_average(&sys, &x0, f, a.steps)?);
    }

    let residues: Vec<String> = points.iter().map(|x| x.residue().to_string()).collect();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "orbit of {} under x -> x^{n} mod {p}^{precision}, {} steps:",
        x0.residue(),
        a.steps
    );
    let _ = writeln!(text, "  {}", residues.join(", "));
    let _ = writeln!(text, "{:<28} {:<14} Haar integral", "function", "time average");
    for b in &averages {
        let name = match b.function {
            TestFunction::BallIndicator { center, depth } => {
                let m = checked_prime_power(p, l + depth)?;
                format!("1 on B_{{1/{m}}}({center})")
            }
            TestFunction::Digit { position } => format!("digit {position}"),
        };
        let _ = writeln!(text, "{name:<28} {:<14} {}", b.time_average.to_string(), b.space_average);
    }
    Ok(Output {
        command: "orbit",
        parameters: json!({
            "p": p, "n": n, "l": l, "x0": a.x0.to_string(), "steps": a.steps,
            "depth": a.depth, "precision": precision,
        }),
        results: json!({ "orbit": residues, "birkhoff_averages": to_value(&averages) }),
        text,
        failed: false,
    })
}

fn verify(a: &VerifyArgs) -> Result<Output> {
    let defaults = OracleCaps::default();
    let caps = OracleCaps {
        max_residues: a.max_residues.unwrap_or(defaults.max_residues),
        max_exponent: a.max_exponent.unwrap_or(defaults.max_exponent),
    };
    let primes = |default: &[u64]| a.p.clone().unwrap_or_else(|| default.to_vec());
    let levels = a.l.clone().unwrap_or_else(|| vec![1, 2]);
    let (name, certificates): (&str, Vec<Certificate>) = match a.claim {
        Claim::Lemma1 => {
            let k = a.precision.unwrap_or(4);
            let n_max = a.n_max.unwrap_or(16);
            let certs = primes(&[2, 3, 5, 7])
                .into_iter()
                .map(|p| verify_lemma1(p, k, n_max, &caps))
                .collect::<Result<_>>()?;
            ("lemma1", certs)
        }
        Claim::Generation => {
            let cert = verify_generation(&primes(&[3, 5, 7]), a.l_max.unwrap_or(4), &caps)?;
            ("generation", vec![cert])
        }
        Claim::Minimal => {
            let depth = a.depth.unwrap_or(3);
            let cert = verify_theorem_minimal(&primes(&[3, 5, 7]), &levels, depth, &caps)?;
            ("minimal", vec![cert])
        }
        Claim::Unique => {
            let depth = a.depth.unwrap_or(2);
            let mut certs = Vec::new();
            for p in primes(&[3]) {
                let exponents = match &a.n {
                    Some(ns) => ns.clone(),
                    None => (2..=p * p + 1).filter(|n| n % p != 0).collect(),
                };
                for &n in &exponents {
                    for &l in &levels {
                        certs.push(verify_unique_invariance(p, n, l, depth, &caps)?);
                    }
                }
            }
            ("unique", certs)
        }
        Claim::LogIsometry => {
            let k = a.precision.unwrap_or(5);
            let certs = primes(&[3, 5, 7])
                .into_iter()
                .map(|p| verify_log_isometry(p, k, &caps))
                .collect::<Result<_>>()?;
            ("log-isometry", certs)
        }
    };

    let failed = certificates.iter().any(|c| !c.passed());
    let mut text = String::new();
    for c in &certificates {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{status} {} {}", c.claim, c.parameters);
        for note in &c.annotations {
            let _ = writeln!(text, "    {note}");
        }
        if let Some(w) = &c.witness {
            let _ = writeln!(text, "    witness: {w}");
        }
        let _ = writeln!(text, "    digest: {}", c.digest);
    }
    Ok(Output {
        command: "verify",
        parameters: json!({
            "claim": name,
            "p": a.p, "l": a.l, "n": a.n, "K": a.precision, "n_max": a.n_max,
            "depth": a.depth, "l_max": a.l_max, "caps": to_value(&caps),
        }),
        results: to_value(&certificates),
        text,
        failed,
    })
}

fn perturb(a: &PerturbArgs) -> Result<Output> {
    let SystemArgs { p, n, l } = a.system;
    let base = MonomialSystem::new(p, n, l)?;
    let q = Polynomial::parse(&a.q)?;
    let parameters = json!({
        "p": p, "n": n, "l": l, "q": q.to_string(), "depth": a.depth,
        "steps": a.steps, "explore": a.explore,
    });
    let mut text = String::new();
    if a.explore {
        let obs = explore_boundary_perturbation(&base, &q, a.depth)?;
        let _ = writeln!(
            text,
            "observations for x^{n} + q(x), q = [{q}], on {} (no verdict is drawn)",
            sphere_name(p, l)
        );
        let _ = writeln!(text, "generator of G_{}: {}", p * p, obs.generator_of_g_p2);
        for (inv, lv) in obs.invariance.iter().zip(&obs.levels) {
            let _ = writeln!(
                text,
                "  depth {}: sphere invariant {}, bijective {}, cycles [{}]",
                lv.depth,
                inv.invariant,
                lv.bijective,
                cycle_summary(&lv.cycle_lengths)
            );
        }
        return Ok(Output {
            command: "perturb",
            parameters,
            results: to_value(&obs),
            text,
            failed: false,
        });
    }

    let psys = PerturbedSystem::new(base, q)?;
    let r = perturbed_analysis(&psys, a.depth, a.steps)?;
    let _ = writeln!(
        text,
        "x^{n} + q(x), q = [{}], on {}",
        r.q,
        sphere_name(p, l)
    );
    let _ = writeln!(
        text,
        "q = 0 mod {p}^{} at all {} depth-2 representatives",
        l + 2,
        r.pointwise_checked
    );
    for (inv, lv) in r.invariance.iter().zip(&r.levels) {
        let _ = writeln!(
            text,
            "  depth {}: sphere invariant {}, bijective {}, cycles [{}]",
            lv.depth,
            inv.invariant,
            lv.bijective,
            cycle_summary(&lv.cycle_lengths)
        );
    }
    let c = &r.congruence;
    let _ = writeln!(
        text,
        "congruence mod {p}^{} for N <= {}: {} ({} discrepancies; {})",
        c.modulus_exp,
        c.max_iterations,
        if c.holds { "PASS" } else { "does not hold" },
        c.discrepancy_count,
        if c.expected_to_hold {
            "expected to hold"
        } else {
            "reported only, the quadratic term survives at l = 1"
        }
    );
    for d in &c.discrepancies {
        let _ = writeln!(
            text,
            "    x = {}, N = {}: actual {}, predicted {}",
            d.x, d.iteration, d.actual, d.predicted
        );
    }
    let nc = &r.necessary_condition;
    let _ = writeln!(
        text,
        "transitive on the {} depth-2 balls: {}; generator of G_{}: {}; agree: {}",
        p * (p - 1),
        nc.transitive_on_depth_two,
        p * p,
        nc.generator_of_g_p2,
        nc.agrees
    );
    let failed = (c.expected_to_hold && !c.holds)
        || !nc.agrees
        || r.invariance.iter().any(|i| !i.invariant);
    Ok(Output {
        command: "perturb",
        parameters,
        results: to_value(&r),
        text,
        failed,
    })
}

fn roots(a: &RootsArgs) -> Result<Output> {
    let (p, d) = (a.p, a.d);
    let found = roots_of_unity(d, p, a.precision)?;
    let g = gcd(d, p - 1);
    let note = if g < d {
        format!(
            "x^{d} = 1 has only {g} solution(s) in Z_{p}: the roots of unity in Z_{p} form a \
             cyclic group of order {} and gcd({d}, {}) = {g}, so Q_{p} has no primitive root of unity of order {d}",
            p - 1,
            p - 1
        )
    } else {
        format!("count = gcd({d}, {}) = {g}", p - 1)
    };
    let listed: Vec<Value> = found
        .iter()
        .map(|r| json!({ "residue": r.residue().to_string(), "digits": r.to_string() }))
        .collect();
    let mut text = String::new();
    let _ = writeln!(text, "solutions of x^{d} = 1 in Z_{p}, mod {p}^{}:", a.precision);
    for r in &found {
        let _ = writeln!(text, "  {} = {}", r.residue(), r);
    }
    let _ = writeln!(text, "note: {note}");
    Ok(Output {
        command: "roots",
        parameters: json!({ "p": p, "d": d, "K": a.precision }),
        results: json!({ "count": found.len(), "roots": listed, "note": note }),
        text,
        failed: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("padic-ergodic").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["analyze", "--p", "3", "--n", "2", "--l", "1"]).0, 0);
        assert_eq!(run_args(&["analyze", "--p", "2", "--n", "3", "--l", "1"]).0, 2);
        assert_eq!(run_args(&["analyze", "--p", "3", "--n", "two"]).0, 1);
        assert_eq!(run_args(&["roots", "--p", "2", "--d", "2"]).0, 2);
        assert_eq!(
            run_args(&["orbit", "--p", "3", "--n", "2", "--l", "1", "--x0", "4", "--steps", "0"]).0,
            1
        );
    }

    #[test]
    fn json_is_deterministic() {
        let args = ["--format", "json", "roots", "--p", "7", "--d", "3", "--K", "3"];
        let (c1, a, _) = run_args(&args);
        let (c2, b, _) = run_args(&args);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["results"]["count"], 3);
        for key in ["tool_version", "command", "parameters", "results"] {
            assert!(v.get(key).is_some());
        }
    }

    #[test]
    fn cycle_summaries() {
        assert_eq!(cycle_summary(&[6]), "6");
        assert_eq!(cycle_summary(&[1, 1]), "1x2");
        assert_eq!(cycle_summary(&[2, 1, 2]), "1, 2x2");
    }
}
