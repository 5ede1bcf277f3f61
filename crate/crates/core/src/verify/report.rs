//! Report records and their JSON and text renderings.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::C64;

/// Bumped on any incompatible change to the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexPair {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: ComplexPair,
}

impl NamedValue {
    pub fn new(name: impl Into<String>, value: C64) -> Self {
        Self {
            name: name.into(),
            value: value.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStatus {
    Pass,
    /// Evaluated, but outside tolerance (or, for limit cases, not monotone).
    ToleranceFail,
    /// Evaluation raised an error; `error_code` says which.
    ErrorFail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub index: usize,
    pub identity: String,
    pub inputs: Vec<NamedValue>,
    pub lhs: Option<ComplexPair>,
    pub rhs: Option<ComplexPair>,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub tolerance: f64,
    /// Quadrature nodes spent on this case, when any quadrature ran.
    pub n_used: Option<usize>,
    /// Relative errors along the `p -> 0` sequence, for limit cases.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trend: Vec<f64>,
    pub pass: bool,
    pub status: CaseStatus,
    pub error_code: Option<String>,
    pub error_message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_cases: usize,
    pub n_pass: usize,
    pub n_tolerance_fail: usize,
    pub n_error_fail: usize,
    pub max_rel_err: Option<f64>,
    /// Excluded from determinism comparisons.
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub n_points: usize,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.summary.n_pass == self.summary.n_cases
    }

    /// The report with wall time zeroed, for byte-level comparisons.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.summary.wall_time_s = 0.0;
        r
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidConfig(format!("report serialisation failed: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidConfig(format!("report parse failed: {e}")))
    }

    /// One line per case, then `suite NAME: pass k/n ...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let verdict = match c.status {
                CaseStatus::Pass => "PASS",
                CaseStatus::ToleranceFail => "FAIL",
                CaseStatus::ErrorFail => "ERROR",
            };
            let err = c.rel_err.map_or("-".to_string(), |e| format!("{e:.3e}"));
            let _ = write!(out, "{verdict:5} #{:<4} {:<28} rel_err {err:>10} tol {:.1e}", c.index, c.identity, c.tolerance);
            if !c.trend.is_empty() {
                let t: Vec<String> = c.trend.iter().map(|e| format!("{e:.2e}")).collect();
                let _ = write!(out, " trend [{}]", t.join(", "));
            }
            if let Some(code) = &c.error_code {
                let _ = write!(out, " {code}: {}", c.error_message.as_deref().unwrap_or(""));
            }
            out.push('\n');
        }
        let s = &self.summary;
        let max = s.max_rel_err.map_or("-".to_string(), |e| format!("{e:.3e}"));
        let _ = writeln!(
            out,
            "suite {}: pass {}/{} (tolerance failures {}, errors {}), max rel_err {max}, {:.2} s",
            self.suite, s.n_pass, s.n_cases, s.n_tolerance_fail, s.n_error_fail, s.wall_time_s
        );
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn emit_report(report: &VerificationReport, format: ReportFormat, dest: &Destination) -> Result<()> {
    let body = match format {
        ReportFormat::Json => report.to_json()? + "\n",
        ReportFormat::Text => report.to_text(),
    };
    match dest {
        Destination::Stdout => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes()).map_err(|e| io_err(Path::new("<stdout>"), e))
        }
        Destination::File(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
            }
            std::fs::write(path, body).map_err(|e| io_err(path, e))
        }
    }
}
