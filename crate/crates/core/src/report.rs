//! Serializable run reports for the command-line driver and their text form.

use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conic::SearchLimits;
use crate::construct::{construct_h8, verify_certificate, ExtensionCertificate};
use crate::dihedral::{d4_construct, d4_verify, D4Certificate};
use crate::error::{Error, Result};
use crate::factorizations::{
    d4_candidates, h8_candidates, is_d4_factorization, is_h8_factorization, is_h8_factorization_of, D4Factorization,
    H8Factorization,
};
use crate::serial;
use crate::symbols::{factor_discriminant, is_fundamental};

pub const REPORT_SCHEMA: &str = "h8report/1";
pub const SCAN_SCHEMA: &str = "h8scan/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    H8,
    D4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub reason: String,
    #[serde(with = "serial::string")]
    pub exit_code: i32,
}

impl From<&Error> for Failure {
    fn from(e: &Error) -> Self {
        Self { reason: e.to_string(), exit_code: e.exit_code() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    #[serde(with = "h8_doc")]
    H8(Box<ExtensionCertificate>),
    #[serde(with = "d4_doc")]
    D4(Box<D4Certificate>),
    Failure(Failure),
}

// certificates inside a report keep their own schema tag
macro_rules! cert_doc {
    ($name:ident, $ty:ty) => {
        mod $name {
            use serde::de::Error as _;
            use serde::{Deserialize, Deserializer, Serialize, Serializer};

            #[allow(clippy::borrowed_box)]
            pub fn serialize<S: Serializer>(c: &Box<$ty>, s: S) -> Result<S::Ok, S::Error> {
                c.to_json_value().serialize(s)
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Box<$ty>, D::Error> {
                let v = serde_json::Value::deserialize(d)?;
                <$ty>::from_json_value(v).map(Box::new).map_err(D::Error::custom)
            }
        }
    };
}

cert_doc!(h8_doc, crate::construct::ExtensionCertificate);
cert_doc!(d4_doc, crate::dihedral::D4Certificate);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportEntry {
    /// `(d1, d2, d3)`; for D4 the third entry may be 1.
    #[serde(with = "serial::string_array")]
    pub factorization: [i64; 3],
    /// H8 only: every part is a prime discriminant, so the extension is unique.
    pub unique: Option<bool>,
    /// The certificate passed an independent re-check.
    pub verified: bool,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    #[serde(with = "serial::string")]
    pub d: i64,
    pub kind: ReportKind,
    pub format: OutputFormat,
    pub entries: Vec<ReportEntry>,
    /// Why no factorization exists, when `entries` is empty.
    pub nonexistence: Option<String>,
}

impl RunReport {
    fn new(d: i64, kind: ReportKind) -> Self {
        Self {
            schema: REPORT_SCHEMA.into(),
            d,
            kind,
            format: OutputFormat::Text,
            entries: Vec::new(),
            nonexistence: None,
        }
    }

    /// 0 when every factorization was certified, 1 when there is none,
    /// otherwise the largest failure code.
    pub fn exit_code(&self) -> i32 {
        let worst = self
            .entries
            .iter()
            .map(|e| match &e.outcome {
                Outcome::Failure(f) => f.exit_code,
                _ if !e.verified => 3,
                _ => 0,
            })
            .max();
        worst.unwrap_or(1)
    }

    pub fn certificate_count(&self) -> usize {
        self.entries.iter().filter(|e| !matches!(e.outcome, Outcome::Failure(_))).count()
    }

    pub fn failure_count(&self) -> usize {
        self.entries.len() - self.certificate_count()
    }

    pub fn to_json(&self) -> String {
        let mut r = self.clone();
        r.format = OutputFormat::Json;
        serde_json::to_string_pretty(&r).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if r.schema != REPORT_SCHEMA {
            return Err(Error::InvalidInput(format!("schema {:?}, expected {REPORT_SCHEMA}", r.schema)));
        }
        Ok(r)
    }
}

fn join(parts: &[i64]) -> String {
    parts.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" · ")
}

fn triple(t: &[num_bigint::BigInt; 3]) -> String {
    format!("({}, {}, {})", t[0], t[1], t[2])
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn write_h8(out: &mut String, c: &ExtensionCertificate) -> fmt::Result {
    writeln!(out, "  construction order (d1, d2, d3) = ({}, {}, {}), a = {}", c.d1(), c.d2(), c.d3(), c.a)?;
    writeln!(out, "  x = {}  y = {}  z = {}", triple(&c.x), triple(&c.y), triple(&c.z))?;
    writeln!(out, "  β = {}", c.mu.beta)?;
    writeln!(out, "  γ = {}", c.mu.gamma)?;
    writeln!(out, "  δ = {}", c.mu.delta)?;
    writeln!(out, "  r = {}", c.mu.r)?;
    writeln!(out, "  μ = {}", c.mu.mu)?;
    writeln!(out, "  2-primary twist = {}, sign twist = {}", c.two_primary_twist, c.infinity_twist)?;
    writeln!(out, "  S = {}, ρ-sign = {:+}, group {}", c.s_vector, c.rho_sign, c.group)?;
    match c.totally_real {
        Some(t) => writeln!(out, "  totally real: {}", yes_no(t)),
        None => writeln!(out, "  totally real: no (k is imaginary)"),
    }
}

fn write_d4(out: &mut String, c: &D4Certificate) -> fmt::Result {
    writeln!(out, "  (X, Y, Z) = {}", triple(&c.solution))?;
    writeln!(out, "  α = {}  (scale {})", c.alpha, c.scale)?;
    writeln!(out, "  2-primary twist = {}", c.twist)?;
    writeln!(out, "  S = {}, group {}, α^(1+ψ) = {:+}", c.s_vector, c.group, c.cyclic_sign)?;
    if c.compositum {
        writeln!(out, "  compositum with Q(√{})", c.d3)?;
    } else {
        writeln!(out, "  no compositum (d3 = 1)")?;
    }
    match c.totally_positive {
        Some(t) => writeln!(out, "  α totally positive: {}", yes_no(t)),
        None => Ok(()),
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.kind {
            ReportKind::H8 => "H8",
            ReportKind::D4 => "D4",
        };
        let mut out = String::new();
        if let Ok(fac) = factor_discriminant(self.d) {
            writeln!(out, "d = {} = {}", self.d, fac)?;
        } else {
            writeln!(out, "d = {}", self.d)?;
        }
        if let Some(reason) = &self.nonexistence {
            writeln!(out, "no {label}-factorization of {}: {reason}", self.d)?;
        }
        for e in &self.entries {
            let [d1, d2, d3] = e.factorization;
            match self.kind {
                ReportKind::H8 => writeln!(out, "{label}-factorization {}", join(&e.factorization))?,
                ReportKind::D4 => writeln!(out, "{label}-factorization {} ; {d3}", join(&[d1, d2]))?,
            }
            match &e.outcome {
                Outcome::H8(c) => write_h8(&mut out, c)?,
                Outcome::D4(c) => write_d4(&mut out, c)?,
                Outcome::Failure(x) => writeln!(out, "  failed: {}", x.reason)?,
            }
            if e.unique == Some(true) {
                writeln!(out, "  note: all parts are prime discriminants; the extension is unique")?;
            }
            if !matches!(e.outcome, Outcome::Failure(_)) {
                writeln!(out, "  verified: {}", yes_no(e.verified))?;
            }
        }
        f.write_str(out.trim_end())
    }
}

fn check_discriminant(d: i64) -> Result<()> {
    factor_discriminant(d).map(|_| ())
}

fn describe_failures(candidates: &[[i64; 3]], check: impl Fn(&[i64; 3]) -> Result<()>, kind: ReportKind) -> String {
    if candidates.is_empty() {
        let need = match kind {
            ReportKind::H8 => "three",
            ReportKind::D4 => "two",
        };
        return format!("fewer than {need} prime discriminant factors");
    }
    let reasons: Vec<String> = candidates
        .iter()
        .filter_map(|t| {
            let label = match kind {
                ReportKind::H8 => join(t),
                ReportKind::D4 => format!("{} ; {}", join(&t[..2]), t[2]),
            };
            check(t).err().map(|e| format!("[{label}] {e}"))
        })
        .collect();
    reasons.join("; ")
}

fn h8_entry(f: &H8Factorization, forced_a: Option<u64>, limits: &SearchLimits) -> ReportEntry {
    let unique = Some(f.has_prime_parts());
    match construct_h8(f, forced_a, limits) {
        Ok(c) => {
            let verified = verify_certificate(&c).is_ok();
            ReportEntry { factorization: f.canonical(), unique, verified, outcome: Outcome::H8(Box::new(c)) }
        }
        Err(e) => ReportEntry {
            factorization: f.canonical(),
            unique,
            verified: false,
            outcome: Outcome::Failure((&e).into()),
        },
    }
}

fn d4_entry(f: &D4Factorization, limits: &SearchLimits) -> ReportEntry {
    let factorization = [f.d1, f.d2, f.d3];
    match d4_construct(f, limits) {
        Ok(c) => {
            let verified = d4_verify(&c);
            ReportEntry { factorization, unique: None, verified, outcome: Outcome::D4(Box::new(c)) }
        }
        Err(e) => ReportEntry { factorization, unique: None, verified: false, outcome: Outcome::Failure((&e).into()) },
    }
}

/// Certificates for every H8-factorization of `d`, or for the forced one.
///
/// Errors only on malformed input; construction failures are recorded per
/// entry.
pub fn h8_report(d: i64, forced: Option<[i64; 3]>, forced_a: Option<u64>, limits: &SearchLimits) -> Result<RunReport> {
    check_discriminant(d)?;
    let mut report = RunReport::new(d, ReportKind::H8);
    let factorizations = match forced {
        Some([d1, d2, d3]) => vec![is_h8_factorization_of(d, d1, d2, d3)?],
        None => {
            let candidates = h8_candidates(d)?;
            let found: Vec<H8Factorization> =
                candidates.iter().filter_map(|t| is_h8_factorization(t[0], t[1], t[2]).ok()).collect();
            if found.is_empty() {
                report.nonexistence = Some(describe_failures(
                    &candidates,
                    |t| is_h8_factorization(t[0], t[1], t[2]).map(|_| ()),
                    ReportKind::H8,
                ));
            }
            found
        }
    };
    report.entries = factorizations.iter().map(|f| h8_entry(f, forced_a, limits)).collect();
    Ok(report)
}

/// Certificates for every D4-factorization of `d`, or for the forced one.
pub fn d4_report(d: i64, forced: Option<[i64; 3]>, limits: &SearchLimits) -> Result<RunReport> {
    check_discriminant(d)?;
    let mut report = RunReport::new(d, ReportKind::D4);
    let factorizations = match forced {
        Some([d1, d2, d3]) => {
            let f = is_d4_factorization(d1, d2, d3)?;
            if f.d != d {
                return Err(Error::ProductMismatch { product: f.d, expected: d });
            }
            vec![f]
        }
        None => {
            let candidates = d4_candidates(d)?;
            let found: Vec<D4Factorization> =
                candidates.iter().filter_map(|t| is_d4_factorization(t[0], t[1], t[2]).ok()).collect();
            if found.is_empty() {
                report.nonexistence = Some(describe_failures(
                    &candidates,
                    |t| is_d4_factorization(t[0], t[1], t[2]).map(|_| ()),
                    ReportKind::D4,
                ));
            }
            found
        }
    };
    report.entries = factorizations.iter().map(|f| d4_entry(f, limits)).collect();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScanCounts {
    #[serde(with = "serial::string")]
    pub discriminants: usize,
    #[serde(with = "serial::string")]
    pub with_factorization: usize,
    #[serde(with = "serial::string")]
    pub certificates: usize,
    #[serde(with = "serial::string")]
    pub failures: usize,
    /// H8 only: factorizations whose extension is totally real.
    #[serde(with = "serial::string")]
    pub totally_real: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema: String,
    pub kind: ReportKind,
    /// Half-open range `[start, end)`.
    #[serde(with = "serial::string")]
    pub start: i64,
    #[serde(with = "serial::string")]
    pub end: i64,
    pub counts: ScanCounts,
    /// One report per discriminant with at least one factorization.
    pub reports: Vec<RunReport>,
}

impl ScanReport {
    pub fn exit_code(&self) -> i32 {
        if self.counts.failures > 0 {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = self.clone();
        for r in &mut s.reports {
            r.format = OutputFormat::Json;
        }
        serde_json::to_string_pretty(&s).expect("serializable")
    }
}

impl fmt::Display for ScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.reports {
            let facs: Vec<String> = r
                .entries
                .iter()
                .map(|e| {
                    let mark = match (&e.outcome, e.verified) {
                        (Outcome::Failure(_), _) => " (failed)",
                        (_, false) => " (unverified)",
                        _ => "",
                    };
                    match r.kind {
                        ReportKind::H8 => format!("{}{mark}", join(&e.factorization)),
                        ReportKind::D4 => format!("{} ; {}{mark}", join(&e.factorization[..2]), e.factorization[2]),
                    }
                })
                .collect();
            writeln!(f, "{}: {}", r.d, facs.join(", "))?;
        }
        let c = &self.counts;
        write!(
            f,
            "scanned {} fundamental discriminants in [{}, {}): {} with a factorization, {} certificates, {} failures",
            c.discriminants, self.start, self.end, c.with_factorization, c.certificates, c.failures
        )?;
        if self.kind == ReportKind::H8 {
            write!(f, ", {} totally real", c.totally_real)?;
        }
        Ok(())
    }
}

/// Runs the H8 or D4 pipeline on every fundamental discriminant in
/// `[start, end)`, in parallel, keeping the input order.
pub fn scan(start: i64, end: i64, kind: ReportKind, limits: &SearchLimits) -> ScanReport {
    let ds: Vec<i64> = (start..end).filter(|&d| is_fundamental(d)).collect();
    let reports: Vec<RunReport> = ds
        .par_iter()
        .map(|&d| {
            let r = match kind {
                ReportKind::H8 => h8_report(d, None, None, limits),
                ReportKind::D4 => d4_report(d, None, limits),
            };
            r.unwrap_or_else(|e| {
                let mut r = RunReport::new(d, kind);
                r.entries.push(ReportEntry {
                    factorization: [d, 1, 1],
                    unique: None,
                    verified: false,
                    outcome: Outcome::Failure((&e).into()),
                });
                r
            })
        })
        .collect();
    let mut counts = ScanCounts { discriminants: ds.len(), ..Default::default() };
    let reports: Vec<RunReport> = reports.into_iter().filter(|r| !r.entries.is_empty()).collect();
    for r in &reports {
        counts.with_factorization += 1;
        counts.certificates += r.entries.iter().filter(|e| e.verified).count();
        counts.failures += r.entries.iter().filter(|e| !e.verified).count();
        counts.totally_real +=
            r.entries.iter().filter(|e| matches!(&e.outcome, Outcome::H8(c) if c.totally_real == Some(true))).count();
    }
    ScanReport { schema: SCAN_SCHEMA.into(), kind, start, end, counts, reports }
}
