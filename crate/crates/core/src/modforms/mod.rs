//! Mod-p modular forms as truncated q-expansions over F_{p^m}.

mod character;
mod eisenstein;
mod ops;
mod qexp;

use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldError, FiniteField};

pub use character::DirichletCharacter;
pub use eisenstein::{bernoulli_number, eisenstein, eisenstein_with, generalized_bernoulli};
pub use ops::{
    companion_check, exceptional_check, frobenius_charpoly, hecke, theta, theta_closed_form, theta_pow,
    HeckeOperator,
};
pub use qexp::{read_exchange, write_exchange, QExpansion};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModFormError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("forms live over different coefficient fields")]
    FieldMismatch,
    #[error("level {level} is not prime to p = {p}")]
    LevelNotPrimeToP { level: u64, p: u64 },
    #[error("character modulus {modulus} does not divide level {level}")]
    CharacterLevel { modulus: u64, level: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {l} divides Np (ramified prime)")]
    Ramified { l: u64 },
    #[error("bound {have} is below the required {need}")]
    BoundTooSmall { have: usize, need: usize },
    #[error("weight mismatch: expected {expected}, got {got}")]
    WeightMismatch { expected: i64, got: u32 },
    #[error("character mismatch between the two forms")]
    CharacterMismatch,
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),
    #[error("parity violation: eps1(-1) eps2(-1) != (-1)^{k}")]
    Parity { k: u32 },
    #[error("character value {0} does not lift to 0 or ±1")]
    NotLiftable(String),
    #[error("constant term has a denominator divisible by p = {p}")]
    NonIntegral { p: u64 },
    #[error("weight must be positive")]
    ZeroWeight,
    #[error("exchange format, line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A mod-p q-expansion of weight `k` and level `N` with nebentypus `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModFormModP {
    qexp: QExpansion,
    weight: u32,
    level: u64,
    character: DirichletCharacter,
}

impl ModFormModP {
    pub fn new(qexp: QExpansion, weight: u32, level: u64, character: DirichletCharacter) -> Result<Self, ModFormError> {
        let p = qexp.field().p();
        if weight == 0 {
            return Err(ModFormError::ZeroWeight);
        }
        if level.is_multiple_of(p) {
            return Err(ModFormError::LevelNotPrimeToP { level, p });
        }
        if level == 0 || !level.is_multiple_of(character.modulus()) {
            return Err(ModFormError::CharacterLevel { modulus: character.modulus(), level });
        }
        if qexp.field() != character.field() {
            return Err(ModFormError::FieldMismatch);
        }
        Ok(ModFormModP { qexp, weight, level, character })
    }

    pub fn qexp(&self) -> &QExpansion {
        &self.qexp
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    pub fn p(&self) -> u64 {
        self.qexp.field().p()
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        self.qexp.field()
    }

    pub fn bound(&self) -> usize {
        self.qexp.bound()
    }

    pub(crate) fn with_qexp(&self, qexp: QExpansion, weight: u32) -> Self {
        ModFormModP { qexp, weight, level: self.level, character: self.character.clone() }
    }
}
