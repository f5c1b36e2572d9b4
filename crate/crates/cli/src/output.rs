//! Artifact writers. Every float goes through [`fmt_float`], so output is
//! a pure function of the computed values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use capmono_core::mcf::FlowTrace;
use capmono_core::Status;
use serde::Serialize;

use crate::suites::{trace_label, Finding, MonotoneRow};

pub const MONOTONE_CSV: &str = "monotone.csv";
pub const CHECKS_JSON: &str = "checks.json";
pub const TRACES_CSV: &str = "mcf_traces.csv";
pub const SUMMARY_TXT: &str = "summary.txt";

const MONOTONE_HEADER: &str = "model,n,beta,kind,level,r_level,value,d_surface,d_bulk,d_fd,H,grad_conf";
const TRACES_HEADER: &str = "model,t,rho,area,volume,D";

/// Shortest round-trip decimal; NaN becomes an empty field.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:?}")
    }
}

/// Quotes a CSV field when it contains a separator or a quote.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Rows sorted by `(model, n, kind, beta, level)`.
pub fn monotone_csv(rows: &[MonotoneRow]) -> String {
    let mut sorted: Vec<&MonotoneRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        (a.model.as_str(), a.n, a.kind.as_str())
            .cmp(&(b.model.as_str(), b.n, b.kind.as_str()))
            .then(a.sample.beta.total_cmp(&b.sample.beta))
            .then(a.sample.level.total_cmp(&b.sample.level))
    });
    let mut out = String::from(MONOTONE_HEADER);
    out.push('\n');
    for row in sorted {
        let s = &row.sample;
        let floats = [s.beta, s.level, s.r_level, s.value, s.d_surface, s.d_bulk, s.d_fd, s.mean_curvature, s.grad_conf];
        let _ = write!(out, "{},{}", csv_field(&row.model), row.n);
        for (i, x) in floats.iter().enumerate() {
            out.push(',');
            if i == 1 {
                out.push_str(row.kind.as_str());
                out.push(',');
            }
            out.push_str(&fmt_float(*x));
        }
        out.push('\n');
    }
    out
}

pub fn traces_csv(traces: &[FlowTrace]) -> String {
    let mut out = String::from(TRACES_HEADER);
    out.push('\n');
    for trace in traces {
        let model = csv_field(&trace_label(trace));
        for i in 0..trace.len() {
            let _ = writeln!(
                out,
                "{model},{},{},{},{},{}",
                fmt_float(trace.times[i]),
                fmt_float(trace.rho[i]),
                fmt_float(trace.area[i]),
                fmt_float(trace.volume[i]),
                fmt_float(trace.iso_diff[i]),
            );
        }
    }
    out
}

/// The JSON shape of one check. Non-finite numbers serialize as `null`.
#[derive(Debug, Serialize)]
struct CheckRecord<'a> {
    suite: &'a str,
    check: &'a str,
    model: &'a str,
    params: &'a BTreeMap<String, f64>,
    status: &'a str,
    max_violation: f64,
    tolerance: f64,
    samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

pub fn checks_json(findings: &[Finding]) -> String {
    let records: Vec<CheckRecord<'_>> = findings
        .iter()
        .map(|f| CheckRecord {
            suite: &f.report.suite,
            check: &f.report.check,
            model: &f.report.model,
            params: &f.report.params,
            status: f.report.status.as_str(),
            max_violation: f.report.max_violation,
            tolerance: f.report.tolerance,
            samples: f.report.samples,
            note: f.note.as_deref(),
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&records).expect("check records serialize");
    text.push('\n');
    text
}

/// Status counts, in the order PASS, EQUALITY, NOT_APPLICABLE, FAIL.
pub fn tally(findings: &[Finding]) -> [(Status, usize); 4] {
    let count = |s: Status| findings.iter().filter(|f| f.report.status == s).count();
    [Status::Pass, Status::Equality, Status::NotApplicable, Status::Fail].map(|s| (s, count(s)))
}

pub fn summary(findings: &[Finding]) -> String {
    let param = |f: &Finding, key: &str| f.report.params.get(key).map_or(String::from("-"), |v| fmt_float(*v));
    let rows: Vec<[String; 8]> = findings
        .iter()
        .map(|f| {
            let r = &f.report;
            [
                r.suite.clone(),
                r.check.clone(),
                r.model.clone(),
                param(f, "n"),
                param(f, "beta"),
                r.status.as_str().to_string(),
                format!("{:.3e}", r.max_violation),
                format!("{:.1e}", r.tolerance),
            ]
        })
        .collect();
    let header = ["suite", "check", "model", "n", "beta", "status", "violation", "tolerance"];
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[&str]| {
        let text: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", text.join("  ").trim_end());
    };
    line(&header);
    for row in &rows {
        line(&row.iter().map(String::as_str).collect::<Vec<_>>());
    }
    let _ = writeln!(out);
    let counts: Vec<String> = tally(findings).iter().map(|(s, c)| format!("{s}: {c}")).collect();
    let _ = writeln!(out, "{}", counts.join("  "));
    for f in findings.iter().filter(|f| f.note.is_some()) {
        let _ = writeln!(out, "note [{}.{} {}]: {}", f.report.suite, f.report.check, f.report.model, f.note.as_deref().unwrap_or(""));
    }
    out
}

/// Writes the four artifacts into `dir`, creating it if needed.
pub fn write_all(dir: &Path, rows: &[MonotoneRow], traces: &[FlowTrace], findings: &[Finding]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(MONOTONE_CSV), monotone_csv(rows))?;
    fs::write(dir.join(CHECKS_JSON), checks_json(findings))?;
    fs::write(dir.join(TRACES_CSV), traces_csv(traces))?;
    fs::write(dir.join(SUMMARY_TXT), summary(findings))?;
    Ok(())
}
