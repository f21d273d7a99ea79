//! Report rows, CSV and JSON serialization, and plot series.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;
use serde_json::json;

use crate::io::{short_hash, FormatError};

pub const CSV_COLUMNS: [&str; 13] = [
    "experiment",
    "R",
    "rho",
    "delta",
    "eps",
    "K",
    "seed",
    "lhs",
    "rhs",
    "ratio",
    "mu_hat",
    "pass",
    "runtime_ms",
];

/// Outcome of one row: a checked inequality, or a row whose preconditions
/// fail and which is reported for comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Flagged,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "true",
            Self::Fail => "false",
            Self::Flagged => "flagged",
        })
    }
}

/// One configuration × seed. Missing values print as empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub r: Option<f64>,
    pub rho: Option<f64>,
    pub delta: Option<f64>,
    pub eps: Option<f64>,
    pub k: Option<f64>,
    pub seed: Option<u64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub mu_hat: Option<f64>,
    pub pass: Verdict,
    pub runtime_ms: u64,
}

impl ReportRow {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            r: None,
            rho: None,
            delta: None,
            eps: None,
            k: None,
            seed: None,
            lhs: 0.0,
            rhs: 0.0,
            ratio: 0.0,
            mu_hat: None,
            pass: Verdict::Pass,
            runtime_ms: 0,
        }
    }

    /// Sets `lhs`, `rhs` and their ratio.
    pub fn sides(mut self, lhs: f64, rhs: f64) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self.ratio = if rhs > 0.0 { lhs / rhs } else if lhs == 0.0 { 0.0 } else { f64::INFINITY };
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Gate {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRecord {
    pub series: String,
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub experiment: String,
    pub rows: Vec<ReportRow>,
    /// Hash of the family behind each row, empty when there is none.
    pub row_families: Vec<String>,
    pub fits: Vec<FitRecord>,
    pub gates: Vec<Gate>,
    pub notes: Vec<String>,
    /// Named scalar diagnostics.
    pub values: BTreeMap<String, f64>,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: ReportRow, family_hash: impl Into<String>) {
        self.rows.push(row);
        self.row_families.push(family_hash.into());
    }

    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    /// Fraction of non-flagged rows that pass.
    pub fn pass_rate(&self) -> Option<f64> {
        let checked: Vec<_> = self.rows.iter().filter(|r| r.pass != Verdict::Flagged).collect();
        if checked.is_empty() {
            return None;
        }
        let ok = checked.iter().filter(|r| r.pass == Verdict::Pass).count();
        Some(ok as f64 / checked.len() as f64)
    }
}

fn cell<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or(String::new(), |v| v.to_string())
}

/// CSV report for all experiments, after a `# config_hash=` line.
pub fn to_csv(reports: &[ExperimentReport], config_hash: &str) -> String {
    let mut out = format!("# config_hash={config_hash}\n{}\n", CSV_COLUMNS.join(","));
    for rep in reports {
        for r in &rep.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.experiment,
                cell(&r.r),
                cell(&r.rho),
                cell(&r.delta),
                cell(&r.eps),
                cell(&r.k),
                cell(&r.seed),
                r.lhs,
                r.rhs,
                r.ratio,
                cell(&r.mu_hat),
                r.pass,
                r.runtime_ms
            );
        }
    }
    out
}

/// JSON summary: fits, gates, pass rates and provenance hashes.
pub fn summary_json(reports: &[ExperimentReport], config_hash: &str, csv: &str) -> serde_json::Value {
    let experiments: Vec<_> = reports
        .iter()
        .map(|r| {
            json!({
                "experiment": r.experiment,
                "rows": r.rows.len(),
                "pass_rate": r.pass_rate(),
                "passed": r.passed(),
                "fits": r.fits,
                "gates": r.gates,
                "notes": r.notes,
                "values": r.values,
                "row_families": r.row_families,
            })
        })
        .collect();
    json!({
        "config_hash": config_hash,
        "csv_hash": short_hash(csv.as_bytes()),
        "passed": reports.iter().all(ExperimentReport::passed),
        "experiments": experiments,
    })
}

/// A parsed CSV row, with the columns the plot series need.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub experiment: String,
    pub r: Option<f64>,
    pub rho: Option<f64>,
    pub k: Option<f64>,
    pub ratio: f64,
}

/// Reads a report CSV, returning its config hash and rows.
pub fn read_csv(text: &str) -> Result<(Option<String>, Vec<CsvRow>), FormatError> {
    let mut hash = None;
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    let perr = |line: usize, msg: String| FormatError::Parse { line, msg };
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            if let Some(h) = rest.trim().strip_prefix("config_hash=") {
                hash = Some(h.to_string());
            }
            continue;
        }
        let fields: Vec<&str> = t.split(',').collect();
        let Some(cols) = &header else {
            for c in ["experiment", "R", "rho", "K", "ratio"] {
                if !fields.contains(&c) {
                    return Err(perr(line, format!("missing column {c:?}")));
                }
            }
            header = Some(fields.iter().map(|s| s.to_string()).collect());
            continue;
        };
        if fields.len() != cols.len() {
            return Err(perr(line, format!("expected {} fields, found {}", cols.len(), fields.len())));
        }
        let get = |name: &str| fields[cols.iter().position(|c| c == name).expect("checked")];
        let num = |name: &str| -> Result<Option<f64>, FormatError> {
            let v = get(name);
            if v.is_empty() {
                return Ok(None);
            }
            v.parse()
                .map(Some)
                .map_err(|_| perr(line, format!("bad {name} value {v:?}")))
        };
        rows.push(CsvRow {
            experiment: get("experiment").to_string(),
            r: num("R")?,
            rho: num("rho")?,
            k: num("K")?,
            ratio: num("ratio")?.unwrap_or(f64::NAN),
        });
    }
    Ok((hash, rows))
}

/// `log2(R), log2(ratio)` series keyed by experiment, separation law and `K`.
pub fn plot_series(rows: &[CsvRow]) -> BTreeMap<String, Vec<(f64, f64)>> {
    let mut out: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for row in rows {
        let Some(r) = row.r.filter(|&r| r > 1.0) else {
            continue;
        };
        if !(row.ratio > 0.0 && row.ratio.is_finite()) {
            continue;
        }
        let law = match row.rho {
            Some(rho) if rho > 0.0 => format!("rho=R^{:.2}", rho.ln() / r.ln()),
            _ => "rho=none".to_string(),
        };
        let k = row.k.map_or("K=none".to_string(), |k| format!("K={k}"));
        out.entry(format!("{}_{law}_{k}", row.experiment))
            .or_default()
            .push((r.log2(), row.ratio.log2()));
    }
    out
}
