//! The `wmi` command: loads a problem file, runs one query, and prints a
//! single JSON object on stdout.
//!
//! Exit codes: 0 success, 1 input error, 2 capacity or backend error,
//! 3 failed identity check.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use wmi_core::measures::{factorize, validate_pdf};
use wmi_core::oracle::{grid_oracle_result, GridSpec};
use wmi_core::problem::parse_problem_str;
use wmi_core::wmi::{check_identities, compute_wmc, compute_wmi};
use wmi_core::{Backend, MeasureResult, Method, Problem, Query, WmiError};

#[derive(Parser, Debug)]
#[command(name = "wmi", version, about = "Weighted model counting and integration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the query named in the problem file (default: wmi).
    Compute(Common),
    /// Total mass of the weight and whether it is a density.
    ValidatePdf(Common),
    /// Boolean marginal and per-assignment normalizers of a density.
    Factorize(Common),
    /// Run every identity check that applies to the problem.
    CheckIdentities(Common),
    /// Brute-force grid Riemann sum.
    Oracle(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Problem file (JSON).
    problem: PathBuf,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_resolution: Option<usize>,
    /// Include the per-assignment contributions.
    #[arg(long)]
    breakdown: bool,
    /// Worker threads; `WMI_THREADS` takes precedence.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodArg {
    Exact,
    Mc,
    Auto,
    Oracle,
}

enum Failure {
    Input(WmiError),
    Capacity(WmiError),
}

impl From<WmiError> for Failure {
    fn from(e: WmiError) -> Self {
        if e.is_capacity() {
            Failure::Capacity(e)
        } else {
            Failure::Input(e)
        }
    }
}

struct Output {
    body: Map<String, Value>,
    code: i32,
}

fn configure_threads(requested: Option<usize>) {
    let from_env = std::env::var("WMI_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok());
    if let Some(n) = from_env.or(requested).filter(|&n| n > 0) {
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn load(c: &Common) -> Result<Problem, Failure> {
    let text = std::fs::read_to_string(&c.problem).map_err(|e| {
        Failure::Input(WmiError::InvalidInput(format!(
            "cannot read {}: {e}",
            c.problem.display()
        )))
    })?;
    let mut p = parse_problem_str(&text)?;
    if let Some(m) = c.method {
        p.settings.backend = match m {
            MethodArg::Exact => Backend::Exact,
            MethodArg::Mc => Backend::Mc,
            MethodArg::Auto | MethodArg::Oracle => Backend::Auto,
        };
    }
    if let Some(n) = c.mc_samples {
        p.settings.mc_samples = n;
    }
    if let Some(s) = c.seed {
        p.settings.seed = s;
    }
    if let Some(r) = c.grid_resolution {
        p.oracle_resolution = Some(r);
    }
    Ok(p)
}

fn result_fields(r: &MeasureResult, breakdown: bool) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("value".into(), r.value.to_json());
    m.insert("method".into(), json!(r.method.as_str()));
    m.insert("definition".into(), json!(r.definition.as_str()));
    if let Some(se) = r.stderr {
        m.insert("stderr".into(), json!(se));
    }
    if let Some(seed) = r.seed {
        m.insert("seed".into(), json!(seed));
    }
    if let Some(n) = r.samples {
        m.insert("samples".into(), json!(n));
    }
    if r.method == Method::Exact {
        m.insert("cells".into(), json!(r.cells));
        m.insert("empty_cells".into(), json!(r.empty_cells));
    }
    if breakdown {
        let rows: Vec<Value> = r
            .breakdown
            .iter()
            .map(|(b, q)| json!({"assignment": b.to_string(), "value": q.to_json()}))
            .collect();
        m.insert("breakdown".into(), Value::Array(rows));
    }
    m
}

fn oracle(p: &Problem, c: &Common) -> Result<Output, Failure> {
    let g = match p.oracle_resolution {
        Some(r) => GridSpec::new(r)?,
        None => GridSpec::for_budget(p.universe.num_reals(), 1_000_000),
    };
    let r = grid_oracle_result(p, g)?;
    let mut body = result_fields(&r, c.breakdown);
    body.insert("resolution".into(), json!(g.resolution));
    Ok(Output { body, code: 0 })
}

fn execute(cmd: &Command) -> Result<Output, Failure> {
    let (c, query) = match cmd {
        Command::Compute(c) => (c, None),
        Command::ValidatePdf(c) => (c, Some(Query::ValidatePdf)),
        Command::Factorize(c) => (c, Some(Query::Factorize)),
        Command::CheckIdentities(c) => (c, Some(Query::CheckIdentities)),
        Command::Oracle(c) => {
            configure_threads(c.threads);
            let p = load(c)?;
            return oracle(&p, c);
        }
    };
    configure_threads(c.threads);
    let p = load(c)?;
    if c.method == Some(MethodArg::Oracle) {
        return oracle(&p, c);
    }
    match query.unwrap_or(p.query) {
        Query::Wmi => Ok(Output {
            body: result_fields(&compute_wmi(&p)?, c.breakdown),
            code: 0,
        }),
        Query::Wmc => Ok(Output {
            body: result_fields(&compute_wmc(&p)?, c.breakdown),
            code: 0,
        }),
        Query::ValidatePdf => {
            let r = validate_pdf(&p.weight, &p.universe, &p.settings)?;
            let mut body = result_fields(&r.mass, c.breakdown);
            body.insert("is_pdf".into(), json!(r.is_pdf));
            Ok(Output { body, code: 0 })
        }
        Query::Factorize => {
            let f = factorize(&p.weight, &p.universe, &p.settings)?;
            let mut body = Map::new();
            if let Value::Object(report) = f.to_json() {
                body.extend(report);
            }
            Ok(Output { body, code: 0 })
        }
        Query::CheckIdentities => {
            let report = check_identities(&p)?;
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|k| {
                    json!({
                        "name": k.name,
                        "lhs": k.lhs.to_json(),
                        "rhs": k.rhs.to_json(),
                        "pass": k.pass,
                    })
                })
                .collect();
            let mut body = Map::new();
            body.insert("method".into(), json!(report.method.as_str()));
            body.insert("checks".into(), Value::Array(checks));
            body.insert("pass".into(), json!(report.all_pass()));
            let code = if report.all_pass() { 0 } else { 3 };
            Ok(Output { body, code })
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let start = std::time::Instant::now();
    let (mut body, code) = match execute(&cli.command) {
        Ok(out) => (out.body, out.code),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            (error_body(&e, "input"), 1)
        }
        Err(Failure::Capacity(e)) => {
            eprintln!("error: {e}");
            (error_body(&e, "capacity"), 2)
        }
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    // Seeded results must be byte-identical across runs, so their timing
    // goes to stderr only.
    if body.contains_key("seed") {
        eprintln!("elapsed_ms: {elapsed_ms:.3}");
    } else {
        body.insert("elapsed_ms".into(), json!((elapsed_ms * 1e3).round() / 1e3));
    }
    println!("{}", Value::Object(body));
    code
}

fn error_body(e: &WmiError, kind: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("error".into(), json!(e.to_string()));
    m.insert("kind".into(), json!(kind));
    m
}
