//! Report aggregation and emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::runner::{CheckRecord, KernelTable, Verdict};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

impl Summary {
    pub fn of(records: &[CheckRecord]) -> Self {
        let count = |v| records.iter().filter(|r| r.verdict == v).count();
        Self { total: records.len(), passed: count(Verdict::Pass), failed: count(Verdict::Fail), inconclusive: count(Verdict::Inconclusive) }
    }
}

/// Everything in the JSON body is a function of the config and seed. Wall
/// times and kernel tables travel alongside but outside the body.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: String,
    pub config_digest: String,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
    #[serde(skip)]
    pub kernels: Vec<KernelTable>,
    #[serde(skip)]
    pub total_ms: f64,
}

pub fn config_digest(scenarios: &[ScenarioConfig]) -> String {
    let canonical = serde_json::to_vec(scenarios).expect("scenario configs serialize");
    let digest = Sha256::digest(&canonical);
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl Report {
    pub fn new(scenarios: &[ScenarioConfig], records: Vec<CheckRecord>, kernels: Vec<KernelTable>, total_ms: f64) -> Self {
        let summary = Summary::of(&records);
        Self { version: env!("CARGO_PKG_VERSION").to_string(), config_digest: config_digest(scenarios), records, summary, kernels, total_ms }
    }

    pub fn exit_code(&self) -> i32 {
        if self.summary.failed > 0 {
            EXIT_FAIL
        } else if self.summary.inconclusive > 0 {
            EXIT_INCONCLUSIVE
        } else {
            EXIT_PASS
        }
    }

    pub fn json_body(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn text_table(&self) -> String {
        let headers = ["scenario", "check", "residual", "tolerance", "verdict", "ms"];
        let rows: Vec<[String; 6]> = self
            .records
            .iter()
            .map(|r| {
                let cmp = match r.comparison {
                    crate::checks::Comparison::AtMost => "≤ ",
                    crate::checks::Comparison::AtLeast => "≥ ",
                    crate::checks::Comparison::Prediction => "? ",
                };
                [
                    r.scenario.clone(),
                    r.id.clone(),
                    format!("{:.3e}", r.residual),
                    format!("{cmp}{:.1e}", r.tolerance),
                    format!("{:?}", r.verdict).to_uppercase(),
                    format!("{:.1}", r.wall_ms),
                ]
            })
            .collect();
        let mut width = headers.map(|h| h.chars().count());
        for row in &rows {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, (cell, w)) in cells.iter().zip(&width).enumerate() {
                let pad = w - cell.chars().count();
                if i >= 2 && i != 4 {
                    s.push_str(&" ".repeat(pad));
                    s.push_str(cell);
                } else {
                    s.push_str(cell);
                    s.push_str(&" ".repeat(pad));
                }
                s.push_str("  ");
            }
            s.trim_end().to_string()
        };
        let mut out = String::new();
        out.push_str(&line(&headers.map(String::from)));
        out.push('\n');
        out.push_str(&width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
        out.push('\n');
        for row in &rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        let s = &self.summary;
        let _ = writeln!(out, "\n{} checks: {} passed, {} failed, {} inconclusive ({:.1} s)", s.total, s.passed, s.failed, s.inconclusive, self.total_ms / 1e3);
        for r in self.records.iter().filter(|r| r.verdict != Verdict::Pass) {
            if let Some(note) = &r.note {
                let _ = writeln!(out, "  {} {}: {note}", r.scenario, r.id);
            }
        }
        out
    }

    /// One CSV per kernel scan.
    pub fn kernel_csvs(&self) -> Vec<(String, String)> {
        self.kernels
            .iter()
            .map(|k| {
                let mut s = String::from("z0,z1,r,re,im\n");
                for (z, r, v) in &k.rows {
                    let _ = writeln!(s, "{:e},{:e},{r},{:e},{:e}", z[0], z[1], v.re, v.im);
                }
                (format!("kernel_{}.csv", sanitize(&k.scenario)), s)
            })
            .collect()
    }
}

fn sanitize(name: &str) -> String {
    name.chars().map(|ch| if ch.is_ascii_alphanumeric() || ch == '-' || ch == '_' { ch } else { '_' }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutputFormat {
    Json,
    Text,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other:?} (json, text, csv)")),
        }
    }
}

/// Writes the selected formats into `dir`, creating it if needed.
pub fn emit_report(report: &Report, formats: &[OutputFormat], dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: &str| -> std::io::Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    for f in formats {
        match f {
            OutputFormat::Json => {
                put("report.json", &report.json_body())?;
                let timing: Vec<_> = report.records.iter().map(|r| serde_json::json!({"scenario": r.scenario, "id": r.id, "wall_ms": r.wall_ms})).collect();
                let timing = serde_json::json!({"total_ms": report.total_ms, "records": timing});
                put("timing.json", &serde_json::to_string_pretty(&timing).expect("timing serializes"))?;
            }
            OutputFormat::Text => put("report.txt", &report.text_table())?,
            OutputFormat::Csv => {
                for (name, body) in report.kernel_csvs() {
                    put(&name, &body)?;
                }
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::Comparison;

    fn record(verdict: Verdict) -> CheckRecord {
        CheckRecord {
            id: "algebra.jacobi".into(),
            anchor: "x".into(),
            scenario: "s".into(),
            residual: 1e-13,
            tolerance: 1e-12,
            comparison: Comparison::AtMost,
            verdict,
            note: None,
            wall_ms: 3.0,
        }
    }

    #[test]
    fn empty_report_has_zero_summary() {
        let r = Report::new(&[], vec![], vec![], 0.0);
        assert_eq!(r.summary, Summary::default());
        assert_eq!(r.exit_code(), EXIT_PASS);
    }

    #[test]
    fn exit_codes() {
        let code = |vs: &[Verdict]| Report::new(&[], vs.iter().map(|v| record(*v)).collect(), vec![], 0.0).exit_code();
        assert_eq!(code(&[Verdict::Pass, Verdict::Fail]), EXIT_FAIL);
        assert_eq!(code(&[Verdict::Pass, Verdict::Inconclusive]), EXIT_INCONCLUSIVE);
        assert_eq!(code(&[Verdict::Inconclusive, Verdict::Fail]), EXIT_FAIL);
        assert_eq!(code(&[Verdict::Pass]), EXIT_PASS);
    }

    #[test]
    fn body_excludes_wall_time() {
        let mut a = Report::new(&[], vec![record(Verdict::Pass)], vec![], 10.0);
        let b = a.json_body();
        a.records[0].wall_ms = 99.0;
        a.total_ms = 1.0;
        assert_eq!(a.json_body(), b);
        assert!(!b.contains("wall_ms"));
        let v: serde_json::Value = serde_json::from_str(&b).unwrap();
        for key in ["version", "config_digest", "records", "summary"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let k = KernelTable { scenario: "w 1".into(), lambdas: vec![0.5], rows: vec![([1.0, 0.5], 0, nawc::linalg::c(1e-3, -2e-3))] };
        let r = Report::new(&[], vec![], vec![k], 0.0);
        let csv = r.kernel_csvs();
        assert_eq!(csv[0].0, "kernel_w_1.csv");
        let mut lines = csv[0].1.lines();
        assert_eq!(lines.next(), Some("z0,z1,r,re,im"));
        assert_eq!(lines.next(), Some("1e0,5e-1,0,1e-3,-2e-3"));
    }

    #[test]
    fn unwritable_directory_errors() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("occupied");
        std::fs::write(&file, "x").unwrap();
        let r = Report::new(&[], vec![], vec![], 0.0);
        assert!(emit_report(&r, &[OutputFormat::Json], &file.join("sub")).is_err());
    }

    #[test]
    fn text_table_aligns_columns() {
        let r = Report::new(&[], vec![record(Verdict::Pass), CheckRecord { scenario: "longer-name".into(), ..record(Verdict::Fail) }], vec![], 0.0);
        let t = r.text_table();
        let lines: Vec<&str> = t.lines().take(4).collect();
        let col = |l: &str| l.find("algebra.jacobi");
        assert_eq!(col(lines[2]), col(lines[3]));
        assert!(t.contains("FAIL") && t.contains("1 failed"));
    }
}
