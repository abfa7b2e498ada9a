//! Truncated q-expansions and their plain-text exchange format.
//!
//! ```text
//! qexp
//! p: 5
//! m: 1
//! k: 5
//! N: 4
//! character: 0 1 0 4
//! 0: 4
//! 1: 1
//! 2: 1
//! ```
//!
//! A value vector lists the coordinates of a field element on the power
//! basis, comma separated (`2,1` is `2 + y` for `m = 2`). The character line
//! gives `ε(0), …, ε(N-1)`. Coefficient lines run `0..=B` without gaps.
//! Blank lines and `#` comments are ignored, and runs of whitespace are
//! treated as one separator.

use std::fmt::Write as _;
use std::sync::Arc;

use super::{DirichletCharacter, ModFormError, ModFormModP};
use crate::field::{FiniteField, ResidueElement};

/// Coefficients `a_0, …, a_B`. Two expansions compare equal when they agree
/// through the smaller of their bounds.
#[derive(Debug, Clone)]
pub struct QExpansion {
    field: Arc<FiniteField>,
    coeffs: Vec<ResidueElement>,
}

impl QExpansion {
    /// `coeffs` must be nonempty.
    pub fn new(field: Arc<FiniteField>, coeffs: Vec<ResidueElement>) -> Self {
        assert!(!coeffs.is_empty(), "a q-expansion needs a_0");
        QExpansion { field, coeffs }
    }

    pub fn zero(field: Arc<FiniteField>, bound: usize) -> Self {
        let coeffs = vec![field.zero(); bound + 1];
        QExpansion { field, coeffs }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ResidueElement] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &ResidueElement {
        &self.coeffs[n]
    }

    pub fn truncate(&self, bound: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(bound + 1);
        QExpansion { field: self.field.clone(), coeffs }
    }

    /// First index `≤ bound` where the two expansions differ.
    pub fn first_difference(&self, other: &Self, bound: usize) -> Option<usize> {
        let b = bound.min(self.bound()).min(other.bound());
        (0..=b).find(|&n| self.coeffs[n] != other.coeffs[n])
    }
}

impl PartialEq for QExpansion {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.first_difference(other, usize::MAX).is_none()
    }
}

fn write_value(out: &mut String, v: &ResidueElement) {
    let parts: Vec<String> = v.coeffs().iter().map(u64::to_string).collect();
    out.push_str(&parts.join(","));
}

/// Canonical text for `f`.
pub fn write_exchange(f: &ModFormModP) -> String {
    let field = f.field();
    let mut out = String::new();
    writeln!(out, "qexp").unwrap();
    writeln!(out, "p: {}", field.p()).unwrap();
    writeln!(out, "m: {}", field.degree()).unwrap();
    writeln!(out, "k: {}", f.weight()).unwrap();
    writeln!(out, "N: {}", f.level()).unwrap();
    out.push_str("character:");
    for v in f.character().values() {
        out.push(' ');
        write_value(&mut out, v);
    }
    out.push('\n');
    for (n, a) in f.qexp().coeffs().iter().enumerate() {
        write!(out, "{n}: ").unwrap();
        write_value(&mut out, a);
        out.push('\n');
    }
    out
}

fn parse_value(field: &FiniteField, s: &str, line: usize) -> Result<ResidueElement, ModFormError> {
    let err = |msg: String| ModFormError::Parse { line, msg };
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<u64>().map_err(|_| err(format!("bad coordinate {c:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != field.degree() {
        return Err(err(format!("expected {} coordinates, got {}", field.degree(), coords.len())));
    }
    if let Some(c) = coords.iter().find(|&&c| c >= field.p()) {
        return Err(err(format!("coordinate {c} is not below p = {}", field.p())));
    }
    Ok(field.from_coeffs(&coords))
}

pub fn read_exchange(text: &str) -> Result<ModFormModP, ModFormError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next = |want: &str| -> Result<(usize, String), ModFormError> {
        let (n, l) = lines.next().ok_or(ModFormError::Parse { line: 0, msg: format!("missing {want}") })?;
        if want == "qexp" {
            return if l == "qexp" {
                Ok((n, String::new()))
            } else {
                Err(ModFormError::Parse { line: n, msg: "expected header \"qexp\"".into() })
            };
        }
        let (key, value) = l
            .split_once(':')
            .ok_or(ModFormError::Parse { line: n, msg: format!("expected \"{want}: …\"") })?;
        if key.trim() != want {
            return Err(ModFormError::Parse { line: n, msg: format!("expected key {want:?}, got {:?}", key.trim()) });
        }
        Ok((n, value.split_whitespace().collect::<Vec<_>>().join(" ")))
    };
    let int = |(n, v): (usize, String)| -> Result<u64, ModFormError> {
        v.parse().map_err(|_| ModFormError::Parse { line: n, msg: format!("bad integer {v:?}") })
    };

    next("qexp")?;
    let p = int(next("p")?)?;
    let m = int(next("m")?)?;
    let k = int(next("k")?)?;
    let level = int(next("N")?)?;
    let (cline, ctext) = next("character")?;
    let field = Arc::new(FiniteField::new(p, m as usize)?);
    let values = ctext
        .split_whitespace()
        .map(|s| parse_value(&field, s, cline))
        .collect::<Result<Vec<_>, _>>()?;
    let character = DirichletCharacter::new(field.clone(), values)?;

    let mut coeffs = Vec::new();
    for (n, l) in lines {
        let (idx, value) = l
            .split_once(':')
            .ok_or(ModFormError::Parse { line: n, msg: "expected \"n: value\"".into() })?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|_| ModFormError::Parse { line: n, msg: format!("bad index {idx:?}") })?;
        if idx != coeffs.len() {
            return Err(ModFormError::Parse { line: n, msg: format!("expected index {}, got {idx}", coeffs.len()) });
        }
        coeffs.push(parse_value(&field, value.trim(), n)?);
    }
    if coeffs.is_empty() {
        return Err(ModFormError::Parse { line: 0, msg: "no coefficients".into() });
    }
    let k = u32::try_from(k).map_err(|_| ModFormError::Parse { line: 0, msg: "weight too large".into() })?;
    ModFormModP::new(QExpansion::new(field, coeffs), k, level, character)
}
