//! Machine-readable reports.
//!
//! Numbers are written as strings with 12 significant digits in lowercase
//! scientific notation. The body excludes the timestamp, so two runs with the
//! same inputs produce identical bodies and body checksums.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const REPORT_SCHEMA_VERSION: &str = "1";
pub const TOOL_NAME: &str = "waycheck";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `None` for non-finite values so they serialize as `null`.
pub fn fmt_num(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.11e}"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub value: Option<String>,
    pub tolerance: Option<String>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckResult {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            value: fmt_num(value),
            tolerance: fmt_num(tolerance),
            pass: value <= tolerance,
            detail: String::new(),
        }
    }

    /// Passes when `value ≥ −slack`; NaN fails.
    pub fn nonnegative(name: impl Into<String>, value: f64, slack: f64) -> Self {
        CheckResult {
            name: name.into(),
            value: fmt_num(value),
            tolerance: fmt_num(slack),
            pass: value >= -slack,
            detail: String::new(),
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            value: None,
            tolerance: None,
            pass,
            detail: detail.into(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub value: Value,
}

impl Measurement {
    pub fn number(name: impl Into<String>, x: f64) -> Self {
        Measurement {
            name: name.into(),
            value: fmt_num(x).map_or(Value::Null, Value::String),
        }
    }

    pub fn flag(name: impl Into<String>, b: bool) -> Self {
        Measurement {
            name: name.into(),
            value: Value::Bool(b),
        }
    }

    pub fn count(name: impl Into<String>, n: usize) -> Self {
        Measurement {
            name: name.into(),
            value: Value::from(n),
        }
    }

    pub fn text(name: impl Into<String>, s: impl Into<String>) -> Self {
        Measurement {
            name: name.into(),
            value: Value::String(s.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub schema_version: String,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_checksum: Option<String>,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measurements: Vec<Measurement>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub verdict: String,
}

impl ReportBody {
    pub fn new(command: &str, seed: u64) -> Self {
        ReportBody {
            schema_version: REPORT_SCHEMA_VERSION.to_string(),
            tool: TOOL_NAME.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            model: None,
            model_checksum: None,
            seed,
            checks: Vec::new(),
            measurements: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
            verdict: String::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Sets the verdict from the checks.
    pub fn finish(mut self) -> Self {
        self.verdict = if self.passed() { "PASS" } else { "FAIL" }.to_string();
        self
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("report bodies serialize")
    }

    pub fn checksum(&self) -> String {
        sha256_hex(&self.canonical_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    #[serde(flatten)]
    pub body: ReportBody,
    /// SHA-256 of the compact JSON body.
    pub body_checksum: String,
    /// Seconds since the Unix epoch; not part of the body.
    pub generated_at: u64,
}

impl ReportFile {
    pub fn new(body: ReportBody) -> Self {
        let generated_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ReportFile {
            body_checksum: body.checksum(),
            body,
            generated_at,
        }
    }

    pub fn to_pretty_json(&self) -> String {
        crate::json::to_pretty(self)
    }

    pub fn to_text(&self) -> String {
        let b = &self.body;
        let mut out = String::new();
        let _ = write!(out, "{} {}", b.tool, b.command);
        if let Some(m) = &b.model {
            let _ = write!(out, " {m}");
        }
        if let Some(c) = &b.model_checksum {
            let _ = write!(out, " (sha256 {})", &c[..12.min(c.len())]);
        }
        out.push('\n');
        let width = b
            .checks
            .iter()
            .map(|c| c.name.chars().count())
            .max()
            .unwrap_or(0);
        for c in &b.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let _ = write!(out, "  {status}  {:<width$}", c.name);
            if let Some(v) = &c.value {
                let _ = write!(out, "  {v}");
            }
            if let Some(t) = &c.tolerance {
                let _ = write!(out, "  (tol {t})");
            }
            if !c.detail.is_empty() {
                let _ = write!(out, "  {}", c.detail);
            }
            out.push('\n');
        }
        for m in &b.measurements {
            let v = match &m.value {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "  {:<width$}    {v}", m.name);
        }
        for row in &b.rows {
            let _ = writeln!(out, "  {row}");
        }
        for n in &b.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        let _ = writeln!(out, "verdict: {}", b.verdict);
        out
    }
}
