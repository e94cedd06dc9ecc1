//! Command-line driver: parses inputs, runs the experiments of `cayley-core`
//! and writes versioned JSON (or CSV) reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cayley_core::arith;
use cayley_core::cayley::{self, CayleyError, Grading};
use cayley_core::count::{self, CountError, Variety};
use cayley_core::cubic::{self, CubicError, CubicSurface, StructureOptions};
use cayley_core::detmethod::{self, DetError, OmegaOptions};
use cayley_core::heights;
use cayley_core::hilbert::{self, HilbertError};
use cayley_core::poly::{parse_poly_auto, MultiPoly, PolyError};
use cayley_core::report::{fit_exponent, ExperimentReport, ExternalConstants};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("property violation: {0}")]
    Violation(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("configuration error: {0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Config(_) => 3,
        }
    }
}

impl From<CountError> for CliError {
    fn from(e: CountError) -> Self {
        match e {
            CountError::Budget { .. } => CliError::Budget(e.to_string()),
            CountError::Cubic(c) => c.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<CubicError> for CliError {
    fn from(e: CubicError) -> Self {
        match e {
            CubicError::Budget { .. } => CliError::Budget(e.to_string()),
            CubicError::PropertyViolation { .. } => CliError::Violation(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<DetError> for CliError {
    fn from(e: DetError) -> Self {
        match e {
            DetError::Budget { .. } => CliError::Budget(e.to_string()),
            DetError::PropertyViolation(_) => CliError::Violation(e.to_string()),
            DetError::Count(c) => c.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<HilbertError> for CliError {
    fn from(e: HilbertError) -> Self {
        match e {
            HilbertError::Budget(_) => CliError::Budget(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<CayleyError> for CliError {
    fn from(e: CayleyError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "cayley", version, about = "Cayley forms, conic pencils and point counts on cubic surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Cubic surfaces, one form in T0..T3 per line.
    #[arg(long, global = true)]
    pub surface: Option<PathBuf>,
    /// Curve file with `form = ...` and optionally `plane = ...`.
    #[arg(long, global = true)]
    pub curve: Option<PathBuf>,
    /// Comma-separated heights.
    #[arg(long = "B", global = true, value_delimiter = ',')]
    pub heights: Vec<u64>,
    #[arg(long, global = true, default_value_t = count::DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for sampled checks; exact computations ignore it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// External constants as `key = value` lines.
    #[arg(long, global = true)]
    pub constants: Option<PathBuf>,
    /// Directory for report files; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cayley form of a curve or hypersurface.
    Cayley,
    /// Conic pencil, leading family and its image.
    Pencil,
    /// Conics of bounded Cayley-form height.
    Census,
    /// Points of bounded height.
    Count {
        /// Count integral points of the chart T0 = 1 in the euclidean ball.
        #[arg(long)]
        affine: bool,
        /// Include the point lists.
        #[arg(long)]
        points: bool,
    },
    /// Least degree of an auxiliary form through S(X; B).
    Aux,
    /// Hilbert-Samuel lower bound and window checks.
    Hs {
        #[arg(long, default_value_t = 10_000)]
        m_max: u64,
        #[arg(long, default_value_t = 200)]
        d_max: u64,
    },
    /// Prime sums, Mertens deviation, Bertrand primes and the divisor inequality.
    Primes {
        #[arg(long, default_value_t = 1_000_000)]
        divisor_max: u64,
    },
    /// Structural checks and counting experiments end to end.
    Verify,
    /// Cone, cylinder, NCC, non-ruled and irreducibility verdicts.
    Classify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Cayley => "cayley",
            Command::Pencil => "pencil",
            Command::Census => "census",
            Command::Count { .. } => "count",
            Command::Aux => "aux",
            Command::Hs { .. } => "hs",
            Command::Primes { .. } => "primes",
            Command::Verify => "verify",
            Command::Classify => "classify",
        }
    }
}

/// Report plus per-height CSV rows `(B, count, seconds)`.
pub struct Outcome {
    pub report: ExperimentReport,
    pub csv: Vec<(u64, u64, f64)>,
    pub violation: Option<String>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn load_surfaces(cli: &Cli) -> Result<Vec<CubicSurface>, CliError> {
    let path = cli.surface.as_ref().ok_or_else(|| CliError::Config("--surface is required".into()))?;
    let s = cubic::parse_surfaces(&read(path)?)?;
    if s.is_empty() {
        return Err(CliError::Config("no surfaces in input".into()));
    }
    Ok(s)
}

/// Plane curve: `form` alone (in P^2) or `form` with `plane` (in P^3).
#[derive(Clone, Debug)]
pub struct CurveInput {
    pub form: MultiPoly,
    pub plane: Option<MultiPoly>,
}

pub fn parse_curve(text: &str) -> Result<CurveInput, CliError> {
    let (mut form, mut plane) = (None, None);
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| CliError::Config(format!("expected key = value, got `{line}`")))?;
        match k.trim() {
            "form" => form = Some(v.trim().to_string()),
            "plane" => plane = Some(v.trim().to_string()),
            other => return Err(CliError::Config(format!("unknown curve key `{other}`"))),
        }
    }
    let form = form.ok_or_else(|| CliError::Config("curve file needs `form = ...`".into()))?;
    match plane {
        Some(p) => Ok(CurveInput { form: parse_poly_auto(&form, 4)?, plane: Some(parse_poly_auto(&p, 4)?) }),
        None => {
            let f = parse_poly_auto(&form, 3)?;
            if f.nvars() != 3 {
                return Err(CliError::Config("a curve without a plane must live in T0..T2".into()));
            }
            Ok(CurveInput { form: f, plane: None })
        }
    }
}

fn load_curve(cli: &Cli) -> Result<Option<CurveInput>, CliError> {
    cli.curve.as_ref().map(|p| parse_curve(&read(p)?)).transpose()
}

fn curve_variety(c: &CurveInput) -> Result<Variety, CliError> {
    Ok(match &c.plane {
        Some(l) => Variety::plane_curve(&c.form, l)?,
        None => Variety::hypersurface(&c.form)?,
    })
}

fn constants(cli: &Cli) -> Result<ExternalConstants, CliError> {
    match &cli.constants {
        None => Ok(ExternalConstants::default()),
        Some(p) => ExternalConstants::from_key_values(&read(p)?).map_err(|e| CliError::Config(e.to_string())),
    }
}

fn heights_or(cli: &Cli, default: &[u64]) -> Vec<u64> {
    if cli.heights.is_empty() {
        default.to_vec()
    } else {
        cli.heights.clone()
    }
}

fn text4(f: &MultiPoly) -> String {
    f.to_text(&cayley_core::poly::default_names(f.nvars()))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialisable result")
}

fn fit_value(xs: &[f64], ys: &[f64]) -> Value {
    match fit_exponent(xs, ys) {
        Some((a, b)) => json!({"exponent": a, "intercept": b, "provenance": "fitted"}),
        None => Value::Null,
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cmd = cli.command.name();
    let mut report = ExperimentReport::new(cmd).input("seed", cli.seed).input("budget", cli.budget);
    if let Some(p) = &cli.surface {
        report = report.input("surface", p.display().to_string());
    }
    if let Some(p) = &cli.curve {
        report = report.input("curve", p.display().to_string());
    }
    let k = constants(cli)?;
    report = report.input("constants", &k);
    let mut csv = Vec::new();
    let mut violation = None;
    let results = match &cli.command {
        Command::Cayley => {
            if let Some(c) = load_curve(cli)? {
                match &c.plane {
                    Some(l) => {
                        let psi = cayley::cayley_plane_curve(&c.form, l)?;
                        let parts: Vec<String> = cayley::cayley_degree_parts(&psi.poly, Grading::S0).iter().map(|p| p.to_text(&cayley::plucker_names())).collect();
                        let audit = heights::height_comparison_audit(&psi.poly, 3, 1, psi.degree() as u64).ok();
                        json!({"curve": text4(&c.form), "plane": text4(l), "cayley_form": psi.to_text(), "degree": psi.degree(), "s0_parts": parts, "height_audit": audit})
                    }
                    None => {
                        let psi = cayley::cayley_hypersurface(&c.form)?;
                        json!({"curve": text4(&c.form), "cayley_form": psi.to_text(&cayley::wedge_names(2))})
                    }
                }
            } else {
                let out: Vec<Value> = load_surfaces(cli)?
                    .iter()
                    .map(|x| {
                        let psi = cayley::cayley_hypersurface(&x.f)?;
                        Ok(json!({"surface": text4(&x.f), "cayley_form": psi.to_text(&cayley::wedge_names(3))}))
                    })
                    .collect::<Result<_, CliError>>()?;
                Value::Array(out)
            }
        }
        Command::Pencil => {
            let opts = StructureOptions { seed: cli.seed, budget: cli.budget.min(1 << 24), ..Default::default() };
            let mut out = Vec::new();
            for x in load_surfaces(cli)? {
                let r = cubic::structure_report(&x, &opts)?;
                if !r.violations.is_empty() && violation.is_none() {
                    violation = Some(r.violations.join("; "));
                }
                out.push(to_value(&r));
            }
            Value::Array(out)
        }
        Command::Census => {
            let bs = heights_or(cli, &[10, 100, 1000]);
            report = report.input("B", &bs);
            let mut out = Vec::new();
            for x in load_surfaces(cli)? {
                let lines = cubic::find_lines(&x, 2, cli.budget.min(1 << 24))?;
                let line = lines.first().ok_or_else(|| CliError::Config("no rational line of height <= 2".into()))?;
                let pencil = cubic::conic_family_unchecked(&x, line)?;
                let mut rows = Vec::new();
                for &b in &bs {
                    let t = Instant::now();
                    let r = cubic::conic_census(&pencil, b, 1 << 16)?;
                    csv.push((b, r.count, t.elapsed().as_secs_f64()));
                    rows.push(r);
                }
                let xs: Vec<f64> = rows.iter().map(|r| r.bound.parse::<f64>().unwrap()).collect();
                let ys: Vec<f64> = rows.iter().map(|r| r.count as f64).collect();
                out.push(json!({"surface": text4(&x.f), "rows": to_value(&rows), "fit": fit_value(&xs, &ys)}));
            }
            Value::Array(out)
        }
        Command::Count { affine, points } => {
            let bs = heights_or(cli, &[4, 8, 16]);
            report = report.input("B", &bs).input("affine", affine);
            let varieties: Vec<(String, Variety)> = match load_curve(cli)? {
                Some(c) => vec![(text4(&c.form), curve_variety(&c)?)],
                None => load_surfaces(cli)?
                    .iter()
                    .map(|x| {
                        let f = if *affine { count::affine_chart(&x.f) } else { x.f.clone() };
                        Ok((text4(&x.f), Variety::hypersurface(&f)?))
                    })
                    .collect::<Result<_, CliError>>()?,
            };
            let mut out = Vec::new();
            for (name, v) in varieties {
                let mut rows = Vec::new();
                for &b in &bs {
                    let mut r = if *affine { count::enumerate_affine(&v, b, cli.budget)? } else { count::enumerate_projective(&v, b, cli.budget)? };
                    csv.push((b, r.count, r.seconds));
                    if !points {
                        r.points.clear();
                    }
                    if r.trivial_audit.as_ref().is_some_and(|a| !a.holds) && violation.is_none() {
                        violation = Some(format!("trivial bound fails at B = {b}"));
                    }
                    rows.push(to_value(&r));
                }
                out.push(json!({"variety": name, "rows": rows}));
            }
            Value::Array(out)
        }
        Command::Aux => {
            let bs = heights_or(cli, &[4, 16, 64]);
            report = report.input("B", &bs);
            let v = match load_curve(cli)? {
                Some(c) => curve_variety(&c)?,
                None => Variety::hypersurface(&load_surfaces(cli)?[0].f)?,
            };
            let opts = OmegaOptions { budget: cli.budget, constants: k.clone(), ..Default::default() };
            let (reps, fit) = detmethod::omega_growth(&v, &bs, &opts)?;
            json!({"rows": to_value(&reps), "omega_exponent": fit, "note": "omega is an empirical witness degree"})
        }
        Command::Hs { m_max, d_max } => {
            let mut q = Vec::new();
            for d in 1..=4 {
                for mu in 1..=6 {
                    let r = hilbert::q_lower_bound_check(d, mu, *m_max)?;
                    if !r.violations.is_empty() && violation.is_none() {
                        violation = Some(format!("lower bound fails for d = {d}, mu = {mu}"));
                    }
                    q.push(r);
                }
            }
            let mut windows = Vec::new();
            for d in 1..=3u32 {
                for delta in 2..=10u32 {
                    let mut failures = Vec::new();
                    for big_d in delta as u64..=*d_max {
                        let w = hilbert::geometric_hs_window(d, delta, big_d)?;
                        if !(w.lower_ok && w.upper_ok) {
                            failures.push(big_d);
                        }
                    }
                    if !failures.is_empty() && violation.is_none() {
                        violation = Some(format!("window fails for d = {d}, delta = {delta}"));
                    }
                    windows.push(json!({"d": d, "delta": delta, "d_max": d_max, "failures": failures}));
                }
            }
            json!({"q_lower_bound": to_value(&q), "geometric_window": windows})
        }
        Command::Primes { divisor_max } => {
            let xs = heights_or(cli, &[10, 100, 1000, 10_000]);
            report = report.input("B", &xs);
            let sums: Vec<Value> = xs.iter().map(|&x| json!({"x": x, "sums": to_value(&arith::prime_sums(x as f64)), "bertrand": arith::bertrand_prime(x).ok()})).collect();
            let xmax = *xs.iter().max().unwrap_or(&2);
            let mertens = arith::mertens_check(xmax.max(2), 1).map_err(|e| CliError::Config(e.to_string()))?;
            let scan = arith::divisor_prime_sum_scan(*divisor_max);
            if !scan.violations.is_empty() {
                violation = Some(format!("divisor inequality fails at {:?}", &scan.violations[..scan.violations.len().min(5)]));
            }
            json!({"sums": sums, "mertens": to_value(&mertens), "divisor_scan": to_value(&scan)})
        }
        Command::Verify => {
            let bs = heights_or(cli, &[16, 32, 64]);
            report = report.input("B", &bs);
            let sopts = StructureOptions { seed: cli.seed, budget: cli.budget.min(1 << 24), ..Default::default() };
            let eopts = count::ExperimentOptions { budget: cli.budget, constants: k.clone(), ..Default::default() };
            let mut out = Vec::new();
            for x in load_surfaces(cli)? {
                let cl = cubic::classify_cubic(&x, &cubic::DEFAULT_PRIMES);
                let structure = cubic::structure_report(&x, &sopts)?;
                let rational = count::points_on_conics_experiment(&x, &bs, &eopts)?;
                let integral = match count::integral_conics_experiment(&x.f, &bs, &eopts) {
                    Ok(e) => to_value(&e),
                    Err(CountError::Precondition(why)) => json!({"skipped": why}),
                    Err(e) => return Err(e.into()),
                };
                let mut v = structure.violations.clone();
                if rational.bound_inequality_holds == Some(false) {
                    v.push("rational count exceeds the bound".into());
                }
                if !v.is_empty() && violation.is_none() {
                    violation = Some(v.join("; "));
                }
                for r in &rational.rows {
                    csv.push((r.bound, r.off_lines, r.seconds));
                }
                out.push(json!({
                    "surface": text4(&x.f),
                    "classification": to_value(&cl),
                    "structure": to_value(&structure),
                    "rational_points_on_conics": to_value(&rational),
                    "integral_points_on_conics": integral,
                    "violations": v,
                }));
            }
            Value::Array(out)
        }
        Command::Classify => {
            let mut out = Vec::new();
            for x in load_surfaces(cli)? {
                let cl = cubic::classify_cubic(&x, &cubic::DEFAULT_PRIMES);
                let irreducible_at = cubic::certify_absolutely_irreducible(&x.f, &cubic::DEFAULT_PRIMES, cli.budget);
                let infinity = cubic::part_at_infinity(&x.f);
                let infinity_at = if infinity.total_degree() == Some(3) {
                    cubic::certify_absolutely_irreducible(&infinity, &cubic::DEFAULT_PRIMES, cli.budget)
                } else {
                    None
                };
                out.push(json!({
                    "surface": text4(&x.f),
                    "classification": to_value(&cl),
                    "absolutely_irreducible_mod": irreducible_at,
                    "part_at_infinity_irreducible_mod": infinity_at,
                    "note": if irreducible_at.is_none() { "no prime certified within the budget" } else { "" },
                }));
            }
            Value::Array(out)
        }
    };
    report.results = results;
    if let Some(v) = &violation {
        report.status = format!("property-violation: {v}");
    }
    Ok(Outcome { report, csv, violation })
}

pub fn csv_text(rows: &[(u64, u64, f64)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["B", "count", "seconds"]).expect("in-memory write");
    for (b, c, s) in rows {
        w.write_record([b.to_string(), c.to_string(), format!("{s:.6}")]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Run and emit outputs; returns the process exit code.
pub fn main_with(cli: &Cli) -> i32 {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("configuration error: {e}");
            return 3;
        }
    }
    let outcome = match run(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let json = outcome.report.to_json();
    let emitted = match &cli.out {
        Some(dir) => fs::create_dir_all(dir)
            .and_then(|_| fs::write(dir.join(format!("{}.json", cli.command.name())), format!("{json}\n")))
            .and_then(|_| match cli.format {
                Format::Csv => fs::write(dir.join(format!("{}.csv", cli.command.name())), csv_text(&outcome.csv)),
                Format::Json => Ok(()),
            }),
        None => {
            match cli.format {
                Format::Json => println!("{json}"),
                Format::Csv => print!("{}", csv_text(&outcome.csv)),
            }
            Ok(())
        }
    };
    if let Err(e) = emitted {
        eprintln!("configuration error: cannot write output: {e}");
        return 3;
    }
    match outcome.violation {
        Some(v) => {
            eprintln!("property violation: {v}");
            1
        }
        None => 0,
    }
}
