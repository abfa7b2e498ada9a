use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::job::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Split,
    NotSplit,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Split => "split",
            Verdict::NotSplit => "not-split",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Outcome of one job. Modes that do not decide splitting (companion,
/// exceptional, selftest) leave `verdict` empty unless they fail, in which
/// case it is `inconclusive`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictReport {
    pub mode: Option<Mode>,
    pub verdict: Option<Verdict>,
    pub s: Option<u64>,
    pub t: Option<u64>,
    pub precision_used: Option<usize>,
    pub extension_degree_used: Option<usize>,
    pub failure_reason: Option<String>,
    pub summary: String,
    pub checks: Vec<String>,
    pub input_digest: String,
}

impl VerdictReport {
    pub fn new(mode: Option<Mode>, input_digest: String) -> Self {
        VerdictReport {
            mode,
            verdict: None,
            s: None,
            t: None,
            precision_used: None,
            extension_degree_used: None,
            failure_reason: None,
            summary: String::new(),
            checks: Vec::new(),
            input_digest,
        }
    }

    /// Marks the report inconclusive with `reason`.
    pub fn fail(&mut self, reason: impl Into<String>) {
        let reason = reason.into();
        self.verdict = Some(Verdict::Inconclusive);
        self.summary = format!("inconclusive: {reason}");
        self.failure_reason = Some(reason);
    }
}

/// Hex SHA-256 of `bytes`.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

fn to_map(r: &VerdictReport) -> BTreeMap<&'static str, Value> {
    let mut m = BTreeMap::new();
    let opt = |v: Option<Value>| v.unwrap_or(Value::Null);
    m.insert("mode", opt(r.mode.map(|x| x.as_str().into())));
    m.insert("verdict", opt(r.verdict.map(|x| x.as_str().into())));
    m.insert("s", opt(r.s.map(Into::into)));
    m.insert("t", opt(r.t.map(Into::into)));
    m.insert("precision_used", opt(r.precision_used.map(Into::into)));
    m.insert("extension_degree_used", opt(r.extension_degree_used.map(Into::into)));
    m.insert("failure_reason", opt(r.failure_reason.clone().map(Into::into)));
    m.insert("summary", r.summary.clone().into());
    m.insert("checks", r.checks.clone().into());
    m.insert("input_digest", r.input_digest.clone().into());
    m
}

/// Byte-stable rendering: JSON with sorted keys, or `key: value` lines.
pub fn emit_report(report: &VerdictReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&to_map(report)).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            let show = |v: Option<String>| v.unwrap_or_else(|| "-".into());
            writeln!(s, "mode: {}", show(report.mode.map(|m| m.to_string()))).unwrap();
            if let Some(v) = report.verdict {
                writeln!(s, "verdict: {}", v.as_str()).unwrap();
            }
            writeln!(s, "summary: {}", report.summary).unwrap();
            if report.s.is_some() || report.t.is_some() {
                writeln!(s, "s: {}", show(report.s.map(|x| x.to_string()))).unwrap();
                writeln!(s, "t: {}", show(report.t.map(|x| x.to_string()))).unwrap();
            }
            if let Some(m) = report.precision_used {
                writeln!(s, "precision used: {m}").unwrap();
            }
            if let Some(n) = report.extension_degree_used {
                writeln!(s, "extension degree used: {n}").unwrap();
            }
            if let Some(r) = &report.failure_reason {
                writeln!(s, "failure reason: {r}").unwrap();
            }
            for c in &report.checks {
                writeln!(s, "  - {c}").unwrap();
            }
            writeln!(s, "input digest: {}", report.input_digest).unwrap();
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split_report() -> VerdictReport {
        let mut r = VerdictReport::new(Some(Mode::Verdict), digest(b"{}"));
        r.verdict = Some(Verdict::Split);
        r.s = Some(0);
        r.t = Some(0);
        r.summary = "split".into();
        r
    }

    #[test]
    fn deterministic_and_sorted() {
        let a = emit_report(&split_report(), Format::Json);
        assert_eq!(a, emit_report(&split_report(), Format::Json));
        let keys: Vec<String> = serde_json::from_str::<serde_json::Map<String, Value>>(&a).unwrap().keys().cloned().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn text_has_verdict_line() {
        assert!(emit_report(&split_report(), Format::Text).lines().any(|l| l == "verdict: split"));
    }

    #[test]
    fn failure_sets_reason() {
        let mut r = split_report();
        r.fail("precision too low");
        assert_eq!(r.verdict, Some(Verdict::Inconclusive));
        assert!(r.failure_reason.is_some());
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(digest(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
