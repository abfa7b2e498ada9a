//! Exact arithmetic in R/π^M, where R is the ring of integers of the
//! degree-`n_work` unramified extension of Q_p(ζ_p) and π = 1 - ζ_p.
//!
//! Elements are stored on the power basis of `x = π` over the unramified
//! coefficient ring W_K = (Z/p^K)[y]/(H), modulo the Eisenstein polynomial
//! `E(x) = ((1 - x)^p - 1)/(-x)`. Since `p^K R = π^{K(p-1)} R`, this is an
//! honest quotient ring of R and every ring operation is exact; each element
//! additionally tracks how many π-adic digits of it are meaningful.

mod cyclo;
mod descend;
mod log;
mod witt;

use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldError, FiniteField, ResidueElement};

pub use cyclo::{CycloElement, PiDigitExpansion};
pub use witt::{WittCoefficient, WittRing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("precision {m} is below the minimum p+1 = {min}")]
    PrecisionTooLow { m: usize, min: usize },
    #[error("coefficient modulus {p}^{k} does not fit in 62 bits")]
    CoefficientOverflow { p: u64, k: u32 },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("element is not a 1-unit (leading digit must be 1)")]
    NotAOneUnit,
    #[error("cyclotomic automorphism index {0} is divisible by p")]
    InvalidSigma(u64),
    #[error("subfield degree {n} does not divide working degree {n_work}")]
    NotADivisor { n: usize, n_work: usize },
    #[error("element is not fixed by frobenius^{n}: digit {position} lies outside the subfield")]
    NotInvariant { n: usize, position: usize },
    #[error("operands come from different contexts")]
    ContextMismatch,
}

/// Parameters and precomputed tables for one prime and working degree.
#[derive(Debug)]
pub struct PrimeContext {
    p: u64,
    n_work: usize,
    precision: usize,
    k_exp: u32,
    modulus: u64,
    field: FiniteField,
    witt: WittRing,
    /// `E_0 .. E_{p-1}`, with `E_0 = p` and `E_{p-1} = 1`.
    eisenstein: Vec<u64>,
    /// Coefficients of `-F(x)` where `E(x) = p + x F(x)`, so `p = -x F(x)`.
    p_over_pi: Vec<u64>,
    teich_table: Option<Vec<WittCoefficient>>,
}

/// Builds the context for `p`, residue degree `n_work` and π-adic
/// precision `M`. The coefficient exponent is `K = ceil(M/(p-1)) + 1`.
pub fn make_context(p: u64, n_work: usize, precision: usize) -> Result<Arc<PrimeContext>, PadicError> {
    let field = FiniteField::new(p, n_work)?;
    if precision < p as usize + 1 {
        return Err(PadicError::PrecisionTooLow { m: precision, min: p as usize + 1 });
    }
    let k_exp = (precision.div_ceil(p as usize - 1) + 1) as u32;
    let modulus = p
        .checked_pow(k_exp)
        .filter(|m| *m < (1u64 << 62))
        .ok_or(PadicError::CoefficientOverflow { p, k: k_exp })?;
    let witt = WittRing::new(&field, k_exp, modulus);

    let mut eisenstein = Vec::with_capacity(p as usize);
    let mut binom: u128 = 1;
    for j in 1..=p {
        binom = binom * (p - j + 1) as u128 / j as u128;
        let c = (binom % modulus as u128) as u64;
        // coefficient of x^(j-1) is C(p, j) (-1)^(j-1)
        eisenstein.push(if (j - 1) % 2 == 0 { c } else { (modulus - c) % modulus });
    }
    debug_assert_eq!(eisenstein[0], p % modulus);
    debug_assert_eq!(eisenstein[p as usize - 1], 1);
    debug_assert!(eisenstein[1..p as usize - 1].iter().all(|c| c % p == 0));
    let p_over_pi = eisenstein[1..].iter().map(|c| (modulus - c) % modulus).collect();

    let teich_table = field.order().filter(|&q| q <= 4096).map(|q| {
        (0..q).map(|i| witt.teichmuller(&field.element_from_index(i))).collect()
    });

    Ok(Arc::new(PrimeContext {
        p,
        n_work,
        precision,
        k_exp,
        modulus,
        field,
        witt,
        eisenstein,
        p_over_pi,
        teich_table,
    }))
}

/// Context with the default precision `M = p + 2` (one guard digit above
/// the class precision π^{p+1}).
pub fn default_context(p: u64, n_work: usize) -> Result<Arc<PrimeContext>, PadicError> {
    make_context(p, n_work, p as usize + 2)
}

impl PrimeContext {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n_work(&self) -> usize {
        self.n_work
    }

    /// Tracked π-adic precision `M`.
    pub fn precision(&self) -> usize {
        self.precision
    }

    /// The exponent `K` of the coefficient modulus.
    pub fn coefficient_exponent(&self) -> u32 {
        self.k_exp
    }

    /// `p^K`.
    pub fn coefficient_modulus(&self) -> u64 {
        self.modulus
    }

    /// Number of π-digits representable: `R/p^K = R/π^{K(p-1)}`.
    pub fn capacity(&self) -> usize {
        self.k_exp as usize * (self.p as usize - 1)
    }

    pub fn residue_field(&self) -> &FiniteField {
        &self.field
    }

    pub fn witt(&self) -> &WittRing {
        &self.witt
    }

    /// Coefficients of `E(x)`, little-endian, reduced mod `p^K`.
    pub fn eisenstein_coefficients(&self) -> &[u64] {
        &self.eisenstein
    }

    /// Precision at which unit classes and the splitting criterion live.
    pub fn class_precision(&self) -> usize {
        self.p as usize + 1
    }

    pub fn teichmuller(&self, r: &ResidueElement) -> WittCoefficient {
        match &self.teich_table {
            Some(table) => table[self.field.index_of(r) as usize].clone(),
            None => self.witt.teichmuller(r),
        }
    }

    pub(crate) fn same_as(&self, other: &PrimeContext) -> bool {
        std::ptr::eq(self, other)
            || (self.p == other.p
                && self.n_work == other.n_work
                && self.precision == other.precision)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_exponent_formula() {
        assert_eq!(make_context(3, 1, 5).unwrap().coefficient_exponent(), 4);
        assert_eq!(make_context(5, 1, 7).unwrap().coefficient_exponent(), 3);
    }

    #[test]
    fn degree_one_convention_and_cubic_modulus() {
        let c = make_context(3, 1, 5).unwrap();
        assert_eq!(c.residue_field().modulus(), &[0, 1]);
        let c = make_context(3, 3, 5).unwrap();
        assert_eq!(c.residue_field().modulus(), &[1, 2, 0, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(make_context(2, 1, 5), Err(PadicError::Field(FieldError::NotOddPrime(2)))));
        assert!(matches!(make_context(15, 1, 20), Err(PadicError::Field(_))));
        assert!(matches!(make_context(5, 1, 5), Err(PadicError::PrecisionTooLow { .. })));
        assert!(matches!(make_context(5, 0, 7), Err(PadicError::Field(FieldError::ZeroDegree))));
    }

    #[test]
    fn eisenstein_polynomial_for_p5() {
        let c = make_context(5, 1, 7).unwrap();
        let m = c.coefficient_modulus() as i64;
        let expect: Vec<u64> = [5i64, -10, 10, -5, 1].iter().map(|v| v.rem_euclid(m) as u64).collect();
        assert_eq!(c.eisenstein_coefficients(), expect.as_slice());
    }
}
