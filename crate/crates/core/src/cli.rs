//! Command-line front end.
//!
//! Exit codes: `0` everything passed, `1` at least one failure record, `2`
//! usage or input error, `3` a budget was exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use crate::error::Error;
use crate::gf::{is_prime, parse_field_descriptor, FieldCtx};
use crate::matgf::parse_generator_file;
use crate::permgrp::{gl_order, group_order_bounded, matrix_to_perm};
use crate::poly::{enumerate_nonzero_const, enumerate_primitive};
use crate::verify::{self, HarnessConfig, Report};
use crate::Budget;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

pub const BUDGET_ENV: &str = "FFGROUP_BUDGET_POINTS";

const GRAMMAR: &str = "\
usage:
  ffgroup verify main --q Q --n N
  ffgroup verify degos --p P --n N
  ffgroup verify singer-lemma --q Q --n N
  ffgroup verify fixed-points --q Q --a A --d D
  ffgroup verify two-companion --q Q --n N
  ffgroup verify unique-ext --q Q --n N --d D
  ffgroup verify kantor --q Q --n N
  ffgroup list primitive --q Q --n N
  ffgroup list nonzero-const --q Q --n N
  ffgroup order --q Q --n N --gens PATH
  ffgroup report --qmax QM --nmax NM [--budget-points B] --out PATH
global flags: --format json|csv|text, --workers W, --budget-points B, --budget-scan S, --out PATH
Q is a prime power, written as p^k or as an integer.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "ffgroup", version, about = "Finite-field matrix groups and companion-matrix generation checks", after_help = GRAMMAR)]
struct Cli {
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    budget_points: Option<u64>,
    #[arg(long, global = true)]
    budget_scan: Option<u64>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one verification harness.
    Verify {
        #[command(subcommand)]
        harness: VerifyCmd,
    },
    /// List polynomials.
    List {
        #[command(subcommand)]
        what: ListCmd,
    },
    /// Order of the group generated by the matrices in a file.
    Order {
        #[command(flatten)]
        qn: Qn,
        #[arg(long)]
        gens: PathBuf,
    },
    /// Run every applicable harness over a grid and write a JSON array.
    Report {
        #[arg(long)]
        qmax: u64,
        #[arg(long)]
        nmax: usize,
    },
}

#[derive(Debug, Args)]
struct Qn {
    #[arg(long)]
    q: String,
    #[arg(long)]
    n: usize,
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    Main(Qn),
    Degos {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
    },
    SingerLemma(Qn),
    FixedPoints {
        #[arg(long)]
        q: String,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        d: usize,
    },
    TwoCompanion(Qn),
    UniqueExt {
        #[command(flatten)]
        qn: Qn,
        #[arg(long)]
        d: usize,
    },
    Kantor(Qn),
}

#[derive(Debug, Subcommand)]
enum ListCmd {
    Primitive(Qn),
    NonzeroConst(Qn),
}

/// Resolved run settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub budget: Budget,
    pub workers: usize,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } | Error::ScanTooLarge { .. } => {
                Failure::Budget(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_PASS;
            }
            eprint!("{e}");
            eprintln!("{GRAMMAR}");
            return EXIT_USAGE;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("{GRAMMAR}");
            EXIT_USAGE
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            EXIT_BUDGET
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, Failure> {
    let env_points = match std::env::var(BUDGET_ENV) {
        Ok(v) => Some(v.trim().parse::<u64>().map_err(|_| {
            usage(format!(
                "{BUDGET_ENV} must be a positive integer, got {v:?}"
            ))
        })?),
        Err(_) => None,
    };
    let points = cli
        .budget_points
        .or(env_points)
        .unwrap_or(Budget::DEFAULT_POINTS);
    let scan = cli.budget_scan.unwrap_or(Budget::DEFAULT_SCAN);
    if points == 0 || scan == 0 {
        return Err(usage("budgets must be at least 1"));
    }
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    Ok(RunConfig {
        budget: Budget { points, scan },
        workers,
        format: cli.format,
        output: cli.out.clone(),
    })
}

fn parse_q(s: &str) -> Result<u64, Failure> {
    let (p, k) = parse_field_descriptor(s).map_err(|e| usage(e.to_string()))?;
    p.checked_pow(k)
        .ok_or_else(|| usage(format!("field order {s} is too large")))
}

fn field(q: u64, budget: &Budget) -> Result<std::sync::Arc<FieldCtx>, Failure> {
    let (p, k) =
        crate::gf::prime_power(q).ok_or_else(|| usage(format!("{q} is not a prime power")))?;
    Ok(FieldCtx::new(p, k, budget)?)
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let rc = resolve(&cli)?;
    let hc = HarnessConfig {
        budget: rc.budget,
        workers: rc.workers,
        oracle_cap: None,
    };
    match cli.command {
        Command::Verify { harness } => {
            let report = match harness {
                VerifyCmd::Main(Qn { q, n }) => verify::verify_main_theorem(parse_q(&q)?, n, &hc)?,
                VerifyCmd::Degos { p, n } => {
                    if !is_prime(p) {
                        return Err(usage(format!("--p must be prime, got {p}")));
                    }
                    verify::verify_degos(p, n, &hc)?
                }
                VerifyCmd::SingerLemma(Qn { q, n }) => {
                    verify::verify_singer_lemma(parse_q(&q)?, n, &hc)?
                }
                VerifyCmd::FixedPoints { q, a, d } => {
                    verify::verify_fixed_point_lemma(parse_q(&q)?, a, d, &hc)?
                }
                VerifyCmd::TwoCompanion(Qn { q, n }) => {
                    verify::verify_two_companion(parse_q(&q)?, n, &hc)?
                }
                VerifyCmd::UniqueExt { qn: Qn { q, n }, d } => {
                    verify::verify_unique_extension(parse_q(&q)?, n, d, &hc)?
                }
                VerifyCmd::Kantor(Qn { q, n }) => verify::kantor_scan(parse_q(&q)?, n, &hc)?,
            };
            let reports = [report];
            emit(
                &rc,
                &render_reports(&reports, rc.format.unwrap_or(Format::Json), false)?,
            )?;
            Ok(exit_for(&reports))
        }
        Command::List { what } => {
            let (Qn { q, n }, primitive) = match what {
                ListCmd::Primitive(qn) => (qn, true),
                ListCmd::NonzeroConst(qn) => (qn, false),
            };
            let ctx = field(parse_q(&q)?, &rc.budget)?;
            let polys = if primitive {
                enumerate_primitive(&ctx, n, &rc.budget)?
            } else {
                enumerate_nonzero_const(&ctx, n, &rc.budget)?
            };
            let texts: Vec<String> = polys.iter().map(|f| f.to_text()).collect();
            let body = match rc.format.unwrap_or(Format::Text) {
                Format::Text => lines(&texts),
                Format::Json => json(&texts)?,
                Format::Csv => csv_rows(&["poly"], texts.iter().map(|t| vec![t.clone()]))?,
            };
            emit(&rc, &body)?;
            Ok(EXIT_PASS)
        }
        Command::Order {
            qn: Qn { q, n },
            gens,
        } => {
            let q = parse_q(&q)?;
            let ctx = field(q, &rc.budget)?;
            let text =
                fs::read_to_string(&gens).map_err(|e| usage(format!("{}: {e}", gens.display())))?;
            let mats = parse_generator_file(ctx, Some(n), &text)?;
            let perms = mats
                .iter()
                .map(|m| matrix_to_perm(m, &rc.budget))
                .collect::<crate::Result<Vec<_>>>()?;
            let order = group_order_bounded(&perms, &gl_order(n, &BigUint::from(q)))?;
            let body = match rc.format.unwrap_or(Format::Text) {
                Format::Text => format!("{order}\n"),
                Format::Json => json(&serde_json::json!({ "order": order.to_string() }))?,
                Format::Csv => csv_rows(&["order"], [vec![order.to_string()]])?,
            };
            emit(&rc, &body)?;
            Ok(EXIT_PASS)
        }
        Command::Report { qmax, nmax } => {
            if rc.output.is_none() {
                return Err(usage("report requires --out PATH"));
            }
            let reports = verify::sweep(qmax, nmax, &hc)?;
            emit(
                &rc,
                &render_reports(&reports, rc.format.unwrap_or(Format::Json), true)?,
            )?;
            let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
            eprintln!("{} harness runs, {failures} failures", reports.len());
            Ok(exit_for(&reports))
        }
    }
}

fn exit_for(reports: &[Report]) -> i32 {
    if reports.iter().any(|r| !r.failures.is_empty()) {
        EXIT_FAIL
    } else if reports.iter().any(|r| r.budget_hit) {
        EXIT_BUDGET
    } else {
        EXIT_PASS
    }
}

fn lines(items: &[String]) -> String {
    items.iter().map(|s| format!("{s}\n")).collect()
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| usage(e.to_string()))
}

fn csv_rows<R: IntoIterator<Item = Vec<String>>>(
    header: &[&str],
    rows: R,
) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| usage(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| usage(e.to_string()))
}

fn params_inline(r: &Report) -> String {
    r.params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// JSON gives the full record (an array when `array` is set), CSV one row
/// per run with a failure count, text one summary line per run.
fn render_reports(reports: &[Report], format: Format, array: bool) -> Result<String, Failure> {
    match format {
        Format::Json if array => json(&reports),
        Format::Json => json(&reports[0]),
        Format::Csv => csv_rows(
            &[
                "harness",
                "params",
                "cases_total",
                "cases_checked",
                "failures",
                "elapsed_ms",
                "budget_hit",
                "tool_version",
            ],
            reports.iter().map(|r| {
                vec![
                    r.harness.clone(),
                    params_inline(r),
                    r.cases_total.to_string(),
                    r.cases_checked.to_string(),
                    r.failures.len().to_string(),
                    r.elapsed_ms.to_string(),
                    r.budget_hit.to_string(),
                    r.tool_version.clone(),
                ]
            }),
        ),
        Format::Text => {
            let mut out = String::new();
            for r in reports {
                let status = if r.passed() {
                    "PASS"
                } else if r.failures.is_empty() {
                    "BUDGET"
                } else {
                    "FAIL"
                };
                out += &format!(
                    "{status} {} [{}] cases {}/{} failures {}\n",
                    r.harness,
                    params_inline(r),
                    r.cases_checked,
                    r.cases_total,
                    r.failures.len()
                );
                for f in &r.failures {
                    out += &format!(
                        "  f={} g={} witness={} observed={} expected={}\n",
                        f.f.as_deref().unwrap_or("-"),
                        f.g.as_deref().unwrap_or("-"),
                        f.witness.as_deref().unwrap_or("-").replace('\n', "/"),
                        f.observed,
                        f.expected
                    );
                }
            }
            Ok(out)
        }
    }
}

fn emit(rc: &RunConfig, body: &str) -> Result<(), Failure> {
    match &rc.output {
        Some(path) => write_file(path, body),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .map_err(|e| usage(e.to_string()))
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(|e| usage(format!("{}: {e}", path.display())))
}
