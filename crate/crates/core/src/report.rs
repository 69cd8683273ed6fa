//! Verification reports shared by every experiment: per-case records, an
//! aggregate verdict, JSON and flat-table output.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// One compared quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: usize,
    /// Short human-readable description of the inputs.
    pub inputs: String,
    /// Fingerprint of the full numeric inputs.
    pub inputs_digest: String,
    #[serde(deserialize_with = "nullable_f64")]
    pub predicted: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub quantum: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub deviation: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub tolerance: f64,
    /// Error bar of `predicted` (residual or standard error), when it has one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CaseRecord {
    /// Record passing iff `|predicted − quantum| ≤ tolerance`.
    pub fn compare(
        case_id: usize,
        inputs: String,
        digest: String,
        predicted: f64,
        quantum: f64,
        tolerance: f64,
    ) -> Self {
        let deviation = (predicted - quantum).abs();
        Self {
            case_id,
            inputs,
            inputs_digest: digest,
            predicted,
            quantum,
            deviation,
            tolerance,
            error: None,
            pass: deviation <= tolerance,
            note: None,
        }
    }

    /// A case that could not be evaluated.
    pub fn failed(case_id: usize, inputs: String, digest: String, note: String) -> Self {
        Self {
            case_id,
            inputs,
            inputs_digest: digest,
            predicted: f64::NAN,
            quantum: f64::NAN,
            deviation: f64::NAN,
            tolerance: 0.0,
            error: None,
            pass: false,
            note: Some(note),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// JSON has no NaN; serde_json writes it as `null`, read back here as NaN.
fn nullable_f64<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// First 16 hex digits of the SHA-256 of `text`.
pub fn digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    hash.iter()
        .take(8)
        .fold(String::with_capacity(16), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub experiment: String,
    pub model: String,
    pub cases: Vec<CaseRecord>,
    pub verdict: Verdict,
    pub seed: Option<u64>,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notices: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<serde_json::Value>,
}

impl VerificationReport {
    /// The verdict is `pass` exactly when every case passes.
    pub fn new(
        experiment: impl Into<String>,
        model: impl Into<String>,
        seed: Option<u64>,
        cases: Vec<CaseRecord>,
    ) -> Self {
        let verdict = if cases.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            experiment: experiment.into(),
            model: model.into(),
            cases,
            verdict,
            seed,
            wall_time_ms: 0.0,
            notices: Vec::new(),
            certificate: None,
        }
    }

    pub fn with_certificate(mut self, certificate: serde_json::Value) -> Self {
        self.certificate = Some(certificate);
        self
    }

    pub fn with_notices(mut self, notices: Vec<String>) -> Self {
        self.notices = notices;
        self
    }

    /// Overrides the case-derived verdict with an extra requirement that is
    /// not expressed as a case (e.g. a certificate check).
    pub fn require(mut self, ok: bool) -> Self {
        if !ok {
            self.verdict = Verdict::Fail;
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON without the timing field: identical for identical inputs.
    pub fn payload_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("wall_time_ms");
        }
        serde_json::to_string_pretty(&value).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        emit_table(self, TableFormat::Csv)
    }
}

/// Runs `f` and stamps the elapsed wall time on its report.
pub fn timed<E>(
    f: impl FnOnce() -> Result<VerificationReport, E>,
) -> Result<VerificationReport, E> {
    let start = Instant::now();
    let mut report = f()?;
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

const COLUMNS: [&str; 6] = [
    "case_id",
    "inputs_digest",
    "predicted",
    "quantum",
    "deviation",
    "pass",
];

/// Per-case rows with a fixed column order.
pub fn emit_table(report: &VerificationReport, format: TableFormat) -> String {
    let rows = report.cases.iter().map(|c| {
        [
            c.case_id.to_string(),
            c.inputs_digest.clone(),
            c.predicted.to_string(),
            c.quantum.to_string(),
            c.deviation.to_string(),
            c.pass.to_string(),
        ]
    });
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(&COLUMNS.join(","));
            out.push('\n');
            for r in rows {
                out.push_str(&r.join(","));
                out.push('\n');
            }
        }
        TableFormat::Markdown => {
            let _ = writeln!(out, "| {} |", COLUMNS.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(COLUMNS.len()));
            for r in rows {
                let _ = writeln!(out, "| {} |", r.join(" | "));
            }
        }
    }
    out
}
