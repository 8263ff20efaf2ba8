//! Report emission: CSV tables and a single JSON document, both
//! deterministic byte-for-byte. Floats are printed with 17 significant
//! digits so parsing the output recovers every value exactly.

use std::io::Write;
use std::path::Path;

use crate::experiment::{Cell, ExperimentReport, Table};

/// Render a float at 17 significant digits (exact f64 round-trip).
pub(crate) fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{:.16e}", v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

fn csv_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => fmt_f64(*v),
        Cell::Str(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Empty => String::new(),
    }
}

fn checks_table(report: &ExperimentReport) -> Option<Table> {
    if report.checks.is_empty() {
        return None;
    }
    Some(Table {
        name: "checks".to_string(),
        columns: vec!["name", "lhs", "rhs", "pass"],
        rows: report
            .checks
            .iter()
            .map(|c| {
                vec![
                    Cell::Str(c.name.clone()),
                    Cell::Float(c.lhs),
                    Cell::Float(c.rhs),
                    Cell::Bool(c.pass),
                ]
            })
            .collect(),
    })
}

/// CSV rendering: each table is a header row plus data rows, tables are
/// separated by one blank line, LF endings throughout. Verdicts are appended
/// as a final `checks` table when present.
pub fn emit_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let mut tables: Vec<&Table> = report.tables.iter().collect();
    let checks = checks_table(report);
    if let Some(t) = &checks {
        tables.push(t);
    }
    for (idx, table) in tables.iter().enumerate() {
        if idx > 0 {
            out.push('\n');
        }
        out.push_str(&table.columns.join(","));
        out.push('\n');
        for row in &table.rows {
            let rendered: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&rendered.join(","));
            out.push('\n');
        }
    }
    out
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn json_number(v: f64) -> String {
    if v.is_finite() {
        format!("{:.16e}", v)
    } else {
        // JSON has no non-finite numbers; fall back to strings
        format!("\"{}\"", fmt_f64(v))
    }
}

fn json_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => json_number(*v),
        Cell::Str(s) => format!("\"{}\"", json_escape(s)),
        Cell::Bool(b) => b.to_string(),
        Cell::Empty => "null".to_string(),
    }
}

/// Single JSON document with stable key order:
/// `kind`, `config`, `tables`, `checks`, `pass`.
pub fn emit_json(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"kind\": \"{}\",\n", report.kind.name()));
    out.push_str("  \"config\": {");
    for (idx, (k, v)) in report.config_echo.iter().enumerate() {
        if idx > 0 {
            out.push(',');
        }
        out.push_str(&format!("\n    \"{}\": \"{}\"", json_escape(k), json_escape(v)));
    }
    out.push_str("\n  },\n");
    out.push_str("  \"tables\": [");
    for (tidx, table) in report.tables.iter().enumerate() {
        if tidx > 0 {
            out.push(',');
        }
        out.push_str("\n    {\n");
        out.push_str(&format!("      \"name\": \"{}\",\n", json_escape(&table.name)));
        let cols: Vec<String> =
            table.columns.iter().map(|c| format!("\"{}\"", json_escape(c))).collect();
        out.push_str(&format!("      \"columns\": [{}],\n", cols.join(", ")));
        out.push_str("      \"rows\": [");
        for (ridx, row) in table.rows.iter().enumerate() {
            if ridx > 0 {
                out.push(',');
            }
            let cells: Vec<String> = row.iter().map(json_cell).collect();
            out.push_str(&format!("\n        [{}]", cells.join(", ")));
        }
        if table.rows.is_empty() {
            out.push(']');
        } else {
            out.push_str("\n      ]");
        }
        out.push_str("\n    }");
    }
    if report.tables.is_empty() {
        out.push_str("],\n");
    } else {
        out.push_str("\n  ],\n");
    }
    out.push_str("  \"checks\": [");
    for (cidx, check) in report.checks.iter().enumerate() {
        if cidx > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "\n    {{\"name\": \"{}\", \"lhs\": {}, \"rhs\": {}, \"pass\": {}}}",
            json_escape(&check.name),
            json_number(check.lhs),
            json_number(check.rhs),
            check.pass
        ));
    }
    if report.checks.is_empty() {
        out.push_str("],\n");
    } else {
        out.push_str("\n  ],\n");
    }
    out.push_str(&format!("  \"pass\": {}\n", report.pass));
    out.push_str("}\n");
    out
}

/// Write the report to `path` (or stdout when `None`) in the given format.
pub fn emit_report(
    report: &ExperimentReport,
    format: OutputFormat,
    path: Option<&Path>,
) -> std::io::Result<()> {
    let rendered = match format {
        OutputFormat::Csv => emit_csv(report),
        OutputFormat::Json => emit_json(report),
    };
    match path {
        Some(p) => std::fs::write(p, rendered),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(rendered.as_bytes())
        }
    }
}
