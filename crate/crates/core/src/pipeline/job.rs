//! Job documents: UTF-8 JSON objects with a fixed key set.
//!
//! Ring elements are little-endian π-digit lists. Each digit is a vector of
//! F_p coordinates on the power basis of F_{p^d} (the field of degree `d`
//! defined by the canonical polynomial); all digits of one job share the same
//! `d`, and `d` must divide the working degree `n_work`. `q_digits` starts at
//! position 1 (the leading digit of a 1-unit is 1), `inner_infty_digits` at
//! position 0.

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::fp_poly::is_prime;
use crate::units::mult_order;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    NormalForm,
    QpFromQ,
    Companion,
    Exceptional,
    Verdict,
    Selftest,
}

impl Mode {
    pub const ALL: [Mode; 6] =
        [Mode::NormalForm, Mode::QpFromQ, Mode::Companion, Mode::Exceptional, Mode::Verdict, Mode::Selftest];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::NormalForm => "normal-form",
            Mode::QpFromQ => "qp-from-q",
            Mode::Companion => "companion",
            Mode::Exceptional => "exceptional",
            Mode::Verdict => "verdict",
            Mode::Selftest => "selftest",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.as_str() == s)
    }

    fn uses_ring(self) -> bool {
        matches!(self, Mode::NormalForm | Mode::QpFromQ | Mode::Verdict)
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub type DigitVector = Vec<u64>;

/// A form given inline or as a path to an exchange-format file (resolved
/// relative to the job document).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub level: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub character: Option<Vec<DigitVector>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<DigitVector>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qexp: Option<String>,
}

impl FormBlock {
    /// `a_p` as an element of F_p, when the block is inline and long enough.
    pub fn a_p(&self, p: u64) -> Option<u64> {
        let v = self.coefficients.as_ref()?.get(p as usize)?;
        v[1..].iter().all(|&c| c == 0).then_some(v[0])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JobSpec {
    pub mode: Mode,
    pub p: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_work: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_digits: Option<Vec<DigitVector>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_gamma: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_infty_digits: Option<Vec<DigitVector>>,
    #[serde(rename = "cup_I", skip_serializing_if = "Option::is_none")]
    pub cup_i: Option<DigitVector>,
    /// Uniformizer convention of `inner_infty_digits`, required with them; only `1-zeta_p`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniformizer: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<FormBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub companion_form: Option<FormBlock>,
}

pub const UNIFORMIZER: &str = "1-zeta_p";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldIssue {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for FieldIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JobError {
    #[error("malformed job document: {0}")]
    Syntax(String),
    #[error("invalid job document: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<FieldIssue>),
}

impl JobError {
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Syntax(_) => 1,
            JobError::Invalid(_) => 2,
        }
    }
}

const TOP_KEYS: [&str; 11] = [
    "mode",
    "p",
    "n_work",
    "precision",
    "q_digits",
    "c_gamma",
    "inner_infty_digits",
    "cup_I",
    "uniformizer",
    "form",
    "companion_form",
];
const FORM_KEYS: [&str; 6] = ["k", "N", "m", "character", "coefficients", "qexp"];

#[derive(Default)]
struct Issues(Vec<FieldIssue>);

impl Issues {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldIssue { path: path.into(), message: message.into() });
    }
}

fn uint(v: &Value, path: &str, issues: &mut Issues) -> Option<u64> {
    match v.as_u64() {
        Some(x) => Some(x),
        None => {
            issues.push(path, "expected a non-negative integer");
            None
        }
    }
}

fn digit_vector(v: &Value, path: &str, p: Option<u64>, issues: &mut Issues) -> Option<DigitVector> {
    let Some(items) = v.as_array() else {
        issues.push(path, "expected an array of integers");
        return None;
    };
    if items.is_empty() {
        issues.push(path, "digit vector must be nonempty");
        return None;
    }
    let mut out = Vec::with_capacity(items.len());
    let mut ok = true;
    for (i, x) in items.iter().enumerate() {
        let sub = format!("{path}[{i}]");
        match uint(x, &sub, issues) {
            Some(c) => {
                if let Some(p) = p.filter(|&p| c >= p) {
                    issues.push(sub, format!("coordinate {c} is not below p = {p}"));
                    ok = false;
                }
                out.push(c);
            }
            None => ok = false,
        }
    }
    ok.then_some(out)
}

fn digit_list(v: &Value, path: &str, p: Option<u64>, issues: &mut Issues) -> Option<Vec<DigitVector>> {
    let Some(items) = v.as_array() else {
        issues.push(path, "expected an array of digit vectors");
        return None;
    };
    let digits: Vec<Option<DigitVector>> =
        items.iter().enumerate().map(|(i, x)| digit_vector(x, &format!("{path}[{i}]"), p, issues)).collect();
    let digits: Vec<DigitVector> = digits.into_iter().collect::<Option<_>>()?;
    if let Some(first) = digits.first() {
        if let Some(i) = digits.iter().position(|d| d.len() != first.len()) {
            issues.push(format!("{path}[{i}]"), format!("expected {} coordinates like {path}[0]", first.len()));
            return None;
        }
    }
    Some(digits)
}

fn unknown_keys(obj: &Map<String, Value>, allowed: &[&str], prefix: &str, issues: &mut Issues) {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            issues.push(format!("{prefix}{key}"), "unknown key");
        }
    }
}

fn form_block(v: &Value, path: &str, p: Option<u64>, issues: &mut Issues) -> Option<FormBlock> {
    let Some(obj) = v.as_object() else {
        issues.push(path, "expected an object");
        return None;
    };
    unknown_keys(obj, &FORM_KEYS, &format!("{path}."), issues);
    let before = issues.0.len();
    let get = |k: &str| obj.get(k);
    let mut block = FormBlock { k: None, level: None, m: None, character: None, coefficients: None, qexp: None };
    if let Some(q) = get("qexp") {
        match q.as_str() {
            Some(s) if !s.is_empty() => block.qexp = Some(s.to_string()),
            _ => issues.push(format!("{path}.qexp"), "expected a nonempty path string"),
        }
        for k in ["k", "N", "m", "character", "coefficients"] {
            if obj.contains_key(k) {
                issues.push(format!("{path}.{k}"), "not allowed together with qexp");
            }
        }
        return (issues.0.len() == before).then_some(block);
    }
    for k in ["k", "N", "character", "coefficients"] {
        if !obj.contains_key(k) {
            issues.push(format!("{path}.{k}"), "required (or give qexp)");
        }
    }
    if let Some(x) = get("k").and_then(|x| uint(x, &format!("{path}.k"), issues)) {
        match u32::try_from(x) {
            Ok(k) if k >= 1 => block.k = Some(k),
            _ => issues.push(format!("{path}.k"), "weight must be a positive integer"),
        }
    }
    if let Some(x) = get("N").and_then(|x| uint(x, &format!("{path}.N"), issues)) {
        if x == 0 {
            issues.push(format!("{path}.N"), "level must be positive");
        } else if p.is_some_and(|p| x % p == 0) {
            issues.push(format!("{path}.N"), "level must be prime to p");
        } else {
            block.level = Some(x);
        }
    }
    let m = match get("m").map(|x| uint(x, &format!("{path}.m"), issues)) {
        None => Some(1),
        Some(Some(m)) if (1..=16).contains(&m) => Some(m as usize),
        Some(Some(_)) => {
            issues.push(format!("{path}.m"), "coefficient-field degree must be in 1..=16");
            None
        }
        Some(None) => None,
    };
    block.m = m;
    block.character = get("character").and_then(|x| digit_list(x, &format!("{path}.character"), p, issues));
    block.coefficients = get("coefficients").and_then(|x| digit_list(x, &format!("{path}.coefficients"), p, issues));
    if let (Some(m), Some(ch)) = (m, &block.character) {
        if ch.first().is_some_and(|d| d.len() != m) {
            issues.push(format!("{path}.character"), format!("values must have m = {m} coordinates"));
        }
        if let Some(n) = block.level {
            if ch.len() as u64 != n {
                issues.push(format!("{path}.character"), format!("expected N = {n} values"));
            }
        }
    }
    if let (Some(m), Some(co)) = (m, &block.coefficients) {
        if co.is_empty() {
            issues.push(format!("{path}.coefficients"), "need at least a_0");
        } else if co[0].len() != m {
            issues.push(format!("{path}.coefficients"), format!("values must have m = {m} coordinates"));
        }
    }
    (issues.0.len() == before).then_some(block)
}

/// Parses and validates a job document. `mode_hint` (from the command line)
/// fills a missing `mode` and must agree with a present one. Syntax errors
/// come back as [`JobError::Syntax`]; every semantic problem found is listed
/// in [`JobError::Invalid`].
pub fn parse_job(document: &[u8], mode_hint: Option<Mode>) -> Result<JobSpec, JobError> {
    let text = std::str::from_utf8(document).map_err(|e| JobError::Syntax(format!("not UTF-8: {e}")))?;
    let value: Value = serde_json::from_str(text).map_err(|e| JobError::Syntax(e.to_string()))?;
    let Some(obj) = value.as_object() else {
        return Err(JobError::Invalid(vec![FieldIssue { path: "$".into(), message: "expected a JSON object".into() }]));
    };
    let mut issues = Issues::default();
    unknown_keys(obj, &TOP_KEYS, "", &mut issues);

    let mode = match (obj.get("mode"), mode_hint) {
        (Some(v), hint) => match v.as_str().and_then(Mode::parse) {
            Some(m) if hint.is_none_or(|h| h == m) => Some(m),
            Some(m) => {
                issues.push("mode", format!("document says {m} but {} was requested", hint.unwrap()));
                None
            }
            None => {
                let names: Vec<_> = Mode::ALL.iter().map(|m| m.as_str()).collect();
                issues.push("mode", format!("expected one of {}", names.join(", ")));
                None
            }
        },
        (None, Some(h)) => Some(h),
        (None, None) => {
            issues.push("mode", "required");
            None
        }
    };

    let p = match obj.get("p") {
        None => {
            issues.push("p", "required");
            None
        }
        Some(v) => match uint(v, "p", &mut issues) {
            Some(p) if p > 2 && p < (1 << 20) && is_prime(p) => Some(p),
            Some(_) => {
                issues.push("p", "p must be an odd prime");
                None
            }
            None => None,
        },
    };

    let opt_uint = |key: &str, issues: &mut Issues| obj.get(key).and_then(|v| uint(v, key, issues));
    let n_work = opt_uint("n_work", &mut issues).and_then(|n| {
        if (1..=64).contains(&n) {
            Some(n as usize)
        } else {
            issues.push("n_work", "must be in 1..=64");
            None
        }
    });
    let precision = opt_uint("precision", &mut issues).and_then(|m| match p {
        Some(p) if m < p + 1 => {
            issues.push("precision", format!("must be at least p + 1 = {}", p + 1));
            None
        }
        _ => Some(m as usize),
    });
    let c_gamma = opt_uint("c_gamma", &mut issues).and_then(|c| match p {
        Some(p) if c % p != 1 => {
            issues.push("c_gamma", format!("must be congruent to 1 mod p = {p}"));
            None
        }
        _ => Some(c),
    });
    let q_digits = obj.get("q_digits").and_then(|v| digit_list(v, "q_digits", p, &mut issues));
    let inner = obj.get("inner_infty_digits").and_then(|v| digit_list(v, "inner_infty_digits", p, &mut issues));
    let cup_i = obj.get("cup_I").and_then(|v| digit_vector(v, "cup_I", p, &mut issues));
    let uniformizer = obj.get("uniformizer").and_then(|v| match v.as_str() {
        Some(UNIFORMIZER) => Some(UNIFORMIZER.to_string()),
        _ => {
            issues.push("uniformizer", format!("only \"{UNIFORMIZER}\" is supported"));
            None
        }
    });
    let form = obj.get("form").and_then(|v| form_block(v, "form", p, &mut issues));
    let companion_form = obj.get("companion_form").and_then(|v| form_block(v, "companion_form", p, &mut issues));

    let Some(mode) = mode else {
        return Err(JobError::Invalid(issues.0));
    };

    // required / allowed keys per mode
    let has = |k: &str| obj.contains_key(k);
    let require = |k: &str, why: &str, issues: &mut Issues| {
        if !has(k) {
            issues.push(k, format!("required in {mode} mode{why}"));
        }
    };
    let invariant_source = has("inner_infty_digits") || has("cup_I");
    let allowed: &[&str] = match mode {
        Mode::NormalForm => {
            require("q_digits", "", &mut issues);
            &["n_work", "precision", "q_digits"]
        }
        Mode::QpFromQ => {
            require("q_digits", "", &mut issues);
            require("c_gamma", "", &mut issues);
            &["n_work", "precision", "q_digits", "c_gamma", "form"]
        }
        Mode::Companion => {
            require("form", "", &mut issues);
            require("companion_form", "", &mut issues);
            &["form", "companion_form"]
        }
        Mode::Exceptional => {
            require("form", "", &mut issues);
            &["form"]
        }
        Mode::Verdict if invariant_source => {
            require("inner_infty_digits", " with invariant inputs", &mut issues);
            require("cup_I", " with invariant inputs", &mut issues);
            require("uniformizer", " with invariant inputs", &mut issues);
            &["n_work", "precision", "inner_infty_digits", "cup_I", "uniformizer"]
        }
        Mode::Verdict => {
            if !has("q_digits") {
                issues.push("q_digits", "verdict mode needs q_digits + c_gamma or inner_infty_digits + cup_I");
            }
            require("c_gamma", " with q_digits", &mut issues);
            &["n_work", "precision", "q_digits", "c_gamma", "form"]
        }
        Mode::Selftest => &[],
    };
    for key in obj.keys() {
        let k = key.as_str();
        if TOP_KEYS.contains(&k) && !["mode", "p"].contains(&k) && !allowed.contains(&k) {
            issues.push(k, format!("not used in {mode} mode"));
        }
    }

    // digit vectors must agree on the input degree d, which divides n_work
    let degrees: Vec<(&str, usize)> = [
        ("q_digits", q_digits.as_ref().and_then(|d| d.first()).map(Vec::len)),
        ("inner_infty_digits", inner.as_ref().and_then(|d| d.first()).map(Vec::len)),
        ("cup_I", cup_i.as_ref().map(Vec::len)),
    ]
    .into_iter()
    .filter_map(|(k, d)| d.map(|d| (k, d)))
    .collect();
    let input_degree = degrees.first().map(|&(_, d)| d).unwrap_or(1);
    for &(k, d) in &degrees {
        if d != input_degree {
            issues.push(k, format!("digit vectors have {d} coordinates, expected {input_degree}"));
        }
    }
    if let (Some(p), Some(q)) = (p, &q_digits) {
        if q.len() < p as usize {
            issues.push("q_digits", format!("must cover positions 1..={p}"));
        }
        let m = precision.unwrap_or(p as usize + 2);
        if q.len() >= m {
            issues.push("q_digits", format!("more digits than precision {m} allows"));
        }
    }
    if let (Some(p), Some(d)) = (p, &inner) {
        let m = precision.unwrap_or(p as usize + 2);
        if d.len() > m {
            issues.push("inner_infty_digits", format!("more digits than precision {m} allows"));
        }
    }

    let descent_degree = match (&form, p) {
        (Some(f), Some(p)) if matches!(mode, Mode::QpFromQ | Mode::Verdict) && f.qexp.is_none() => match f.a_p(p) {
            Some(a) if a != 0 => Some(mult_order(a, p).expect("nonzero") as usize),
            _ => {
                issues.push("form.coefficients", "a_p must be a nonzero element of F_p");
                None
            }
        },
        _ => None,
    };
    let mut n_work = n_work;
    if mode.uses_ring() {
        if let Some(p) = p {
            if n_work.is_none() {
                n_work = Some(match mode {
                    Mode::QpFromQ | Mode::Verdict if !invariant_source => {
                        let n = descent_degree.unwrap_or(1);
                        if form.as_ref().is_some_and(|f| f.qexp.is_some()) {
                            // resolved once the form file is read
                            0
                        } else {
                            num_integer::lcm(n, input_degree) * p as usize
                        }
                    }
                    _ => input_degree,
                });
            }
            if let Some(n) = n_work.filter(|&n| n != 0) {
                if n % input_degree != 0 {
                    issues.push("n_work", format!("must be a multiple of the digit degree {input_degree}"));
                }
                if let Some(d) = descent_degree.filter(|d| n % d != 0) {
                    issues.push("n_work", format!("must be a multiple of the order {d} of a_p"));
                }
            }
        }
    }

    if !issues.0.is_empty() {
        return Err(JobError::Invalid(issues.0));
    }
    let p = p.expect("validated");
    let ring = mode.uses_ring();
    Ok(JobSpec {
        mode,
        p,
        n_work: n_work.filter(|&n| n != 0),
        precision: if ring { Some(precision.unwrap_or(p as usize + 2)) } else { None },
        q_digits,
        c_gamma,
        inner_infty_digits: inner,
        cup_i,
        uniformizer,
        form,
        companion_form,
    })
}

impl JobSpec {
    /// Canonical JSON (sorted keys, no insignificant whitespace).
    pub fn to_json(&self) -> String {
        serde_json::to_value(self).expect("serializable").to_string()
    }

    /// Coordinates per digit in the element inputs.
    pub fn input_degree(&self) -> usize {
        [&self.q_digits, &self.inner_infty_digits]
            .into_iter()
            .flatten()
            .find_map(|d| d.first().map(Vec::len))
            .or(self.cup_i.as_ref().map(Vec::len))
            .unwrap_or(1)
    }
}
