//! Report rows and their text, CSV and JSON renderings.

use std::io::{self, Read, Write};

use clap::ValueEnum;
use hvlab::distributions::McEstimate;
use serde::{Deserialize, Serialize};

/// Largest `|analytic − oracle|` accepted.
pub const ORACLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub params: String,
    pub analytic: f64,
    pub mc: Option<f64>,
    pub stderr: Option<f64>,
    pub oracle: Option<f64>,
    pub pass: bool,
}

impl ReportRow {
    pub fn new(experiment: impl Into<String>, params: impl Into<String>, analytic: f64) -> Self {
        Self {
            experiment: experiment.into(),
            params: params.into(),
            analytic,
            mc: None,
            stderr: None,
            oracle: None,
            pass: analytic.is_finite(),
        }
    }

    /// Fails the row unless `|mc − analytic| ≤ sigma·stderr` (plus rounding
    /// slack for exact estimates).
    pub fn with_mc(mut self, est: &McEstimate, sigma: f64) -> Self {
        self.mc = Some(est.mean);
        self.stderr = Some(est.stderr);
        self.pass &= (est.mean - self.analytic).abs() <= sigma * est.stderr + 1e-12;
        self
    }

    pub fn with_oracle(mut self, oracle: f64) -> Self {
        self.oracle = Some(oracle);
        self.pass &= (self.analytic - oracle).abs() < ORACLE_TOL;
        self
    }

    pub fn require(mut self, ok: bool) -> Self {
        self.pass &= ok;
        self
    }
}

/// Rows plus free-text remarks (shown in text mode, sent to stderr
/// otherwise).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
        self.notes.extend(other.notes);
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

pub fn write_text<W: Write>(report: &Report, out: &mut W) -> io::Result<()> {
    for note in &report.notes {
        writeln!(out, "{note}")?;
    }
    let header = ["experiment", "params", "analytic", "mc", "stderr", "oracle", "pass"].map(String::from);
    let cells: Vec<[String; 7]> = report
        .rows
        .iter()
        .map(|r| {
            [
                r.experiment.clone(),
                r.params.clone(),
                r.analytic.to_string(),
                opt(r.mc),
                opt(r.stderr),
                opt(r.oracle),
                if r.pass { "PASS" } else { "FAIL" }.into(),
            ]
        })
        .collect();
    let mut widths = header.clone().map(|h| h.len());
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    for row in std::iter::once(&header).chain(&cells) {
        let line: Vec<String> = row
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end())?;
    }
    let failed = report.rows.iter().filter(|r| !r.pass).count();
    writeln!(out, "{} rows, {} failed", report.rows.len(), failed)
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["experiment", "params", "analytic", "mc", "stderr", "oracle", "pass"])?;
    }
    w.flush()
}

pub fn write_json<W: Write>(rows: &[ReportRow], mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)
}

pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<ReportRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn read_json(input: &str) -> serde_json::Result<Vec<ReportRow>> {
    serde_json::from_str(input)
}

/// Writes the report; notes go to `diag` for machine formats.
pub fn write_report<W: Write, E: Write>(report: &Report, format: Format, out: &mut W, diag: &mut E) -> io::Result<()> {
    match format {
        Format::Text => write_text(report, out),
        Format::Csv | Format::Json => {
            for note in &report.notes {
                writeln!(diag, "{note}")?;
            }
            if format == Format::Csv {
                write_csv(&report.rows, out)
            } else {
                write_json(&report.rows, out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<ReportRow> {
        vec![
            ReportRow::new("a", "x=1,y=(0.1, 0.2)", 0.1 + 0.2).with_oracle(0.30000000000000004),
            ReportRow {
                experiment: "b".into(),
                params: "quote \"q\"".into(),
                analytic: -1.5e-300,
                mc: Some(1.0 / 3.0),
                stderr: Some(2.5e-4),
                oracle: None,
                pass: false,
            },
        ]
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_csv(&rows(), &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("experiment,params,analytic,mc,stderr,oracle,pass\n"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows());
    }

    #[test]
    fn json_round_trip() {
        let mut buf = Vec::new();
        write_json(&rows(), &mut buf).unwrap();
        assert_eq!(read_json(std::str::from_utf8(&buf).unwrap()).unwrap(), rows());
    }

    #[test]
    fn pass_rules() {
        let est = McEstimate {
            mean: 1.0,
            stderr: 0.0,
            samples: 10,
            seed: 0,
        };
        assert!(ReportRow::new("e", "", 1.0).with_mc(&est, 4.0).pass);
        assert!(!ReportRow::new("e", "", 1.1).with_mc(&est, 4.0).pass);
        assert!(!ReportRow::new("e", "", 1.0).with_oracle(1.0 + 1e-8).pass);
        assert!(!ReportRow::new("e", "", 1.0).require(false).pass);
        assert!(!ReportRow::new("e", "", f64::NAN).pass);
    }
}
