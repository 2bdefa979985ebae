//! Command-line driver: argument parsing and the subcommands, returning
//! captured output so the binary stays a thin wrapper.

use clap::{Args, Parser, Subcommand};

use crate::conic::SearchLimits;
use crate::error::Error;
use crate::report::{d4_report, h8_report, scan, ReportKind, RunReport};
use crate::symbols::factor_discriminant;
use crate::table::{check_row, REFERENCE_ROWS};

#[derive(Debug, Parser)]
#[command(name = "h8ext", version, about = "Unramified H8 and D4 extensions of quadratic fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct SearchArgs {
    /// Largest auxiliary parameter a to try.
    #[arg(long, default_value_t = SearchLimits::default().max_a)]
    pub max_a: u64,
    /// Half-width of the small-box conic search before descent.
    #[arg(long, default_value_t = SearchLimits::default().conic_box)]
    pub conic_box: i64,
}

impl SearchArgs {
    fn limits(&self) -> SearchLimits {
        SearchLimits { max_a: self.max_a, conic_box: self.conic_box }
    }
}

#[derive(Debug, Args, Clone, Copy)]
pub struct Parts {
    #[arg(long, allow_negative_numbers = true)]
    pub d1: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d2: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d3: Option<i64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a fundamental discriminant into prime discriminants.
    Factor {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        #[arg(long)]
        json: bool,
    },
    /// Construct the unramified H8-extension for each H8-factorization of d.
    H8 {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        #[command(flatten)]
        parts: Parts,
        /// Force the auxiliary parameter a.
        #[arg(long)]
        a: Option<u64>,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        json: bool,
    },
    /// Construct the unramified D4-extension for each D4-factorization of d.
    D4 {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        #[command(flatten)]
        parts: Parts,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        json: bool,
    },
    /// Check the nine reference generators.
    Table2 {
        #[arg(long)]
        json: bool,
    },
    /// Survey every fundamental discriminant in a range such as 1..600 or -500..=-3.
    Scan {
        #[arg(allow_hyphen_values = true)]
        range: String,
        #[arg(long, conflicts_with = "d4")]
        h8: bool,
        #[arg(long)]
        d4: bool,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        json: bool,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl CliOutput {
    fn ok(stdout: String, code: i32) -> Self {
        Self { stdout, stderr: String::new(), code }
    }

    fn error(e: &Error) -> Self {
        Self { stdout: String::new(), stderr: format!("error: {e}"), code: e.exit_code() }
    }
}

/// Parses `a..b` (half-open) or `a..=b` (inclusive) into `[start, end)`.
pub fn parse_range(s: &str) -> Result<(i64, i64), Error> {
    let bad = || Error::InvalidInput(format!("range {s:?}: expected a..b or a..=b"));
    let (a, b, inclusive) = match s.split_once("..=") {
        Some((a, b)) => (a, b, true),
        None => {
            let (a, b) = s.split_once("..").ok_or_else(bad)?;
            (a, b, false)
        }
    };
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    let end = if inclusive { b.checked_add(1).ok_or_else(bad)? } else { b };
    Ok((a, end))
}

fn forced_h8(p: &Parts) -> Result<Option<[i64; 3]>, Error> {
    match (p.d1, p.d2, p.d3) {
        (None, None, None) => Ok(None),
        (Some(a), Some(b), Some(c)) => Ok(Some([a, b, c])),
        _ => Err(Error::InvalidInput("--d1, --d2 and --d3 must be given together".into())),
    }
}

fn forced_d4(d: i64, p: &Parts) -> Result<Option<[i64; 3]>, Error> {
    match (p.d1, p.d2, p.d3) {
        (None, None, None) => Ok(None),
        (Some(a), Some(b), c) => {
            let c = match c {
                Some(c) => c,
                None if a != 0 && b != 0 && d % (a * b) == 0 => d / (a * b),
                None => return Err(Error::ProductMismatch { product: a * b, expected: d }),
            };
            Ok(Some([a, b, c]))
        }
        _ => Err(Error::InvalidInput("--d1 and --d2 must be given together".into())),
    }
}

fn emit(report: &RunReport, json: bool) -> CliOutput {
    let text = if json { report.to_json() } else { report.to_string() };
    CliOutput::ok(text, report.exit_code())
}

pub fn run(cli: &Cli) -> CliOutput {
    let result = match &cli.command {
        Command::Factor { d, json } => factor_discriminant(*d).map(|f| {
            let text = if *json {
                let parts: Vec<String> = f.values().iter().map(|v| v.to_string()).collect();
                serde_json::to_string_pretty(&serde_json::json!({ "d": d.to_string(), "parts": parts }))
                    .expect("serializable")
            } else {
                f.to_string()
            };
            CliOutput::ok(text, 0)
        }),
        Command::H8 { d, parts, a, search, json } => {
            forced_h8(parts).and_then(|forced| h8_report(*d, forced, *a, &search.limits())).map(|r| emit(&r, *json))
        }
        Command::D4 { d, parts, search, json } => {
            forced_d4(*d, parts).and_then(|forced| d4_report(*d, forced, &search.limits())).map(|r| emit(&r, *json))
        }
        Command::Table2 { json } => Ok(table2(*json)),
        Command::Scan { range, h8: _, d4, search, json } => parse_range(range).map(|(start, end)| {
            let kind = if *d4 { ReportKind::D4 } else { ReportKind::H8 };
            let s = scan(start, end, kind, &search.limits());
            let text = if *json { s.to_json() } else { s.to_string() };
            CliOutput::ok(text, s.exit_code())
        }),
    };
    result.unwrap_or_else(|e| CliOutput::error(&e))
}

fn table2(json: bool) -> CliOutput {
    let limits = SearchLimits::default();
    let rows: Vec<_> = REFERENCE_ROWS.iter().map(|r| check_row(r, &limits)).collect();
    let code = if rows.iter().all(|r| r.passed) { 0 } else { 1 };
    if json {
        return CliOutput::ok(serde_json::to_string_pretty(&rows).expect("serializable"), code);
    }
    let mut lines = Vec::new();
    for r in &rows {
        let status = if r.passed { "PASS" } else { "FAIL" };
        let mut line =
            format!("{status} d = {:>5}  ({}, {}, {})  μ = {}", r.d, r.parts[0], r.parts[1], r.parts[2], r.reference);
        match (&r.error, r.twist) {
            (Some(e), _) => line.push_str(&format!("  error: {e}")),
            (None, Some(t)) => line.push_str(&format!("  δ = {t}")),
            (None, None) => line.push_str("  no δ | d relates the generators"),
        }
        if r.unique {
            line.push_str(if r.same_class { "  same class (unique)" } else { "  different class (unique)" });
        }
        lines.push(line);
    }
    let passed = rows.iter().filter(|r| r.passed).count();
    lines.push(format!("{passed}/{} rows pass", rows.len()));
    CliOutput::ok(lines.join("\n"), code)
}
