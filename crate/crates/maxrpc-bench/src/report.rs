//! Report rows, per-class aggregation, and the CSV / markdown emitters.
//!
//! Reports are deterministic given the manifest and seeds except for the `t`
//! column, which is wall time and never comparable across machines. Columns
//! are emitted in a fixed order: instance, algorithm, verdict, t, n, cc,
//! bumps, class. Aggregate rows follow the per-instance rows.

use std::fmt::Write as _;

/// One benchmark measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub instance: String,
    pub algorithm: String,
    pub verdict: String,
    /// Wall seconds; median over repetitions.
    pub t: f64,
    /// Search nodes (zero for preprocessing runs).
    pub n: u64,
    /// Constraint checks.
    pub cc: u64,
    /// Weight bumps (domain wipeouts).
    pub bumps: u64,
    pub class: String,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    /// Per-(class, algorithm) aggregates: mean t, summed n / cc / bumps.
    pub aggregates: Vec<ReportRow>,
}

impl Report {
    pub fn new(rows: Vec<ReportRow>) -> Self {
        let aggregates = aggregate(&rows);
        Report { rows, aggregates }
    }
}

/// Groups rows by (class, algorithm) in first-appearance order; mean t,
/// total n, cc, and bumps, with the instance column carrying the class tag
/// and the replicate count.
fn aggregate(rows: &[ReportRow]) -> Vec<ReportRow> {
    let mut keys: Vec<(String, String)> = Vec::new();
    for row in rows {
        let key = (row.class.clone(), row.algorithm.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(class, algorithm)| {
            let group: Vec<&ReportRow> = rows
                .iter()
                .filter(|r| r.class == class && r.algorithm == algorithm)
                .collect();
            let count = group.len() as u64;
            ReportRow {
                instance: format!("{class}({count})"),
                algorithm,
                verdict: "-".into(),
                t: group.iter().map(|r| r.t).sum::<f64>() / count.max(1) as f64,
                n: group.iter().map(|r| r.n).sum(),
                cc: group.iter().map(|r| r.cc).sum(),
                bumps: group.iter().map(|r| r.bumps).sum(),
                class,
            }
        })
        .collect()
}

/// Class tag inferred from instance names, mirroring the usual benchmark
/// family groupings.
pub fn infer_class_tag(name: &str) -> String {
    let lower = name.to_ascii_lowercase();
    let tag = if lower.starts_with("scen") || lower.starts_with("graph") {
        "rlfap"
    } else if lower.starts_with("rand") || lower.starts_with("modelb") || lower.starts_with("frb") {
        "random"
    } else if lower.starts_with("geo") {
        "geometric"
    } else if lower.starts_with("qcp") || lower.starts_with("qwh") || lower.starts_with("bqwh") {
        "quasigroup"
    } else if lower.starts_with("queen") || lower.contains("queens") {
        "queens"
    } else if lower.starts_with("driver")
        || lower.starts_with("blackhole")
        || lower.starts_with("haystack")
        || lower.starts_with("js-")
        || lower.starts_with("job")
    {
        "other-structured"
    } else {
        "misc"
    };
    tag.to_string()
}

const HEADER: [&str; 8] = [
    "instance",
    "algorithm",
    "verdict",
    "t",
    "n",
    "cc",
    "bumps",
    "class",
];

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn row_fields(row: &ReportRow) -> [String; 8] {
    [
        row.instance.clone(),
        row.algorithm.clone(),
        row.verdict.clone(),
        format!("{:.6}", row.t),
        row.n.to_string(),
        row.cc.to_string(),
        row.bumps.to_string(),
        row.class.clone(),
    ]
}

pub fn emit_csv(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&HEADER.join(","));
    out.push('\n');
    for row in report.rows.iter().chain(&report.aggregates) {
        let fields = row_fields(row);
        let line: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Parses CSV produced by [`emit_csv`] back into rows (used by the harness
/// round-trip test and downstream tooling).
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>, String> {
    let mut rows = Vec::new();
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty csv")?;
    if header != HEADER.join(",") {
        return Err(format!("unexpected header '{header}'"));
    }
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields = split_csv_line(line)?;
        if fields.len() != 8 {
            return Err(format!("expected 8 fields, found {}", fields.len()));
        }
        rows.push(ReportRow {
            instance: fields[0].clone(),
            algorithm: fields[1].clone(),
            verdict: fields[2].clone(),
            t: fields[3].parse().map_err(|e| format!("bad t: {e}"))?,
            n: fields[4].parse().map_err(|e| format!("bad n: {e}"))?,
            cc: fields[5].parse().map_err(|e| format!("bad cc: {e}"))?,
            bumps: fields[6].parse().map_err(|e| format!("bad bumps: {e}"))?,
            class: fields[7].clone(),
        });
    }
    Ok(rows)
}

fn split_csv_line(line: &str) -> Result<Vec<String>, String> {
    let mut fields = Vec::new();
    let mut field = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    while let Some(c) = chars.next() {
        if quoted {
            match c {
                '"' if chars.peek() == Some(&'"') => {
                    chars.next();
                    field.push('"');
                }
                '"' => quoted = false,
                other => field.push(other),
            }
        } else {
            match c {
                '"' if field.is_empty() => quoted = true,
                ',' => fields.push(std::mem::take(&mut field)),
                other => field.push(other),
            }
        }
    }
    if quoted {
        return Err("unterminated quote".into());
    }
    fields.push(field);
    Ok(fields)
}

pub fn emit_markdown(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", HEADER.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(HEADER.len()));
    for row in &report.rows {
        let fields = row_fields(row);
        let _ = writeln!(out, "| {} |", fields.join(" | "));
    }
    if !report.aggregates.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "Per-class aggregates (mean t, total n/cc/bumps):");
        let _ = writeln!(out);
        let _ = writeln!(out, "| {} |", HEADER.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(HEADER.len()));
        for row in &report.aggregates {
            let fields = row_fields(row);
            let _ = writeln!(out, "| {} |", fields.join(" | "));
        }
    }
    out
}

pub fn emit(report: &Report, format: crate::manifest::OutputFormat) -> String {
    match format {
        crate::manifest::OutputFormat::Csv => emit_csv(report),
        crate::manifest::OutputFormat::Markdown => emit_markdown(report),
    }
}
