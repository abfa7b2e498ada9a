//! Classes of 1-units modulo p-th powers at precision π^{p+1}.
//!
//! Every class in the χ-eigenspace has the normal form `ζ^s (1+π^p)^t` with
//! `s, t ∈ Z/p`; [`extract_normal_form`] recovers `(s, t)` from the digits,
//! and [`brute_force_eigenclasses`] enumerates the eigenspace directly.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::exec::{filter_map_range, ExecMode};
use crate::field::ResidueElement;
use crate::fp_poly::pow_mod;
use crate::padic::{CycloElement, PadicError, PrimeContext};

/// Largest digit-list space [`brute_force_eigenclasses`] will walk.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnitError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("element is not a 1-unit")]
    NotAOneUnit,
    #[error("precision {have} is below the class precision {need}")]
    PrecisionTooLow { have: usize, need: usize },
    #[error("{a} is divisible by p = {p}")]
    ZeroModP { a: u64, p: u64 },
    #[error("c_gamma = {c} is not congruent to 1 mod p = {p}")]
    CGammaNotOneModP { c: u64, p: u64 },
    #[error("enumeration of {count} digit lists exceeds the limit {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },
    #[error("expected {expected} digits, got {got}")]
    WrongDigitCount { expected: usize, got: usize },
}

/// `(s, t) ∈ (Z/p)²` for the class `ζ^s (1+π^p)^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EigenNormalForm {
    p: u64,
    s: u64,
    t: u64,
}

impl EigenNormalForm {
    pub fn new(p: u64, s: i64, t: i64) -> Self {
        let m = p as i64;
        EigenNormalForm { p, s: s.rem_euclid(m) as u64, t: t.rem_euclid(m) as u64 }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// `ζ^s (1+π^p)^t` in `ctx`.
    pub fn to_element(&self, ctx: &Arc<PrimeContext>) -> CycloElement {
        let p = ctx.p() as usize;
        let v = &CycloElement::one(ctx) + &CycloElement::pi_pow(ctx, p);
        &CycloElement::zeta(ctx).pow(self.s) * &v.pow(self.t)
    }
}

impl fmt::Display for EigenNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(s, t) = ({}, {})", self.s, self.t)
    }
}

/// Outcome of [`extract_normal_form`]. When the digits rule out the normal
/// form, `failing_position` names the first offending π-digit and `form`
/// carries whatever was determined before it (`t = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalFormExtraction {
    pub form: EigenNormalForm,
    pub failing_position: Option<usize>,
}

impl NormalFormExtraction {
    pub fn admissible(&self) -> bool {
        self.failing_position.is_none()
    }
}

fn check_class_input(q: &CycloElement) -> Result<(), UnitError> {
    if !q.is_unit() {
        return Err(PadicError::NotAUnit.into());
    }
    if !q.is_one_unit() {
        return Err(UnitError::NotAOneUnit);
    }
    let need = q.context().class_precision();
    if q.precision() < need {
        return Err(UnitError::PrecisionTooLow { have: q.precision(), need });
    }
    Ok(())
}

pub fn extract_normal_form(q: &CycloElement) -> Result<NormalFormExtraction, UnitError> {
    check_class_input(q)?;
    let ctx = q.context();
    let p = ctx.p();
    let field = ctx.residue_field();
    let q = q.truncate(ctx.class_precision());

    let d1 = q.digit(1);
    let Some(d1) = field.prime_field_value(&d1) else {
        return Ok(NormalFormExtraction { form: EigenNormalForm::new(p, 0, 0), failing_position: Some(1) });
    };
    let s = (p - d1) % p;
    let r = &q * &CycloElement::zeta(ctx).pow((p - s) % p);
    let digits = r.digits().digits;
    let fail = |i| NormalFormExtraction { form: EigenNormalForm::new(p, s as i64, 0), failing_position: Some(i) };
    if let Some(i) = (1..p as usize).find(|&i| !digits[i].is_zero()) {
        return Ok(fail(i));
    }
    match field.prime_field_value(&digits[p as usize]) {
        Some(t) => Ok(NormalFormExtraction {
            form: EigenNormalForm::new(p, s as i64, t as i64),
            failing_position: None,
        }),
        None => Ok(fail(p as usize)),
    }
}

/// Whether an admissible normal form is the trivial class. Over a residue
/// field of degree prime to p the p-th powers in `1 + π^p R` are exactly the
/// classes with `t = 0`.
pub fn is_pth_power_class(nf: &EigenNormalForm) -> bool {
    nf.s == 0 && nf.t == 0
}

fn check_c_gamma(ctx: &PrimeContext, c_gamma: u64) -> Result<u64, UnitError> {
    let p = ctx.p();
    if c_gamma % p != 1 {
        return Err(UnitError::CGammaNotOneModP { c: c_gamma, p });
    }
    Ok(c_gamma % ctx.coefficient_modulus())
}

/// (a) `σ_u(q) / q^u` is a trivial class for every `u ∈ (Z/p)^*`, and
/// (b) `frobenius(q) = q^{c_gamma}` modulo π^{p+1}.
pub fn verify_galois_eigen(q: &CycloElement, c_gamma: u64) -> Result<bool, UnitError> {
    check_class_input(q)?;
    let ctx = q.context();
    let c_gamma = check_c_gamma(ctx, c_gamma)?;
    let m = ctx.class_precision();
    let q = q.truncate(m);

    if !q.frobenius().congruent(&q.pow_padic(c_gamma)?, m) {
        return Ok(false);
    }
    for u in 1..ctx.p() {
        let mut ratio = &q.sigma(u)? * &q.pow_padic(u)?.inverse()?;
        let lead = ratio.residue();
        if lead != ctx.residue_field().one() {
            ratio = &ratio * &CycloElement::teichmuller(ctx, &lead).inverse()?;
        }
        let ext = extract_normal_form(&ratio.truncate(m))?;
        if !ext.admissible() || !is_pth_power_class(&ext.form) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A 1-unit modulo π^{p+1}, recorded by its digits at positions `1..=p`.
#[derive(Clone)]
pub struct UnitClass {
    ctx: Arc<PrimeContext>,
    digits: Vec<ResidueElement>,
}

impl UnitClass {
    pub fn from_digits(ctx: &Arc<PrimeContext>, digits: Vec<ResidueElement>) -> Result<Self, UnitError> {
        let expected = ctx.p() as usize;
        if digits.len() != expected {
            return Err(UnitError::WrongDigitCount { expected, got: digits.len() });
        }
        Ok(UnitClass { ctx: ctx.clone(), digits })
    }

    pub fn of(q: &CycloElement) -> Result<Self, UnitError> {
        check_class_input(q)?;
        let m = q.context().class_precision();
        let mut digits = q.truncate(m).digits().digits;
        digits.remove(0);
        Ok(UnitClass { ctx: q.context().clone(), digits })
    }

    /// Digits at positions `1..=p`.
    pub fn digits(&self) -> &[ResidueElement] {
        &self.digits
    }

    pub fn context(&self) -> &Arc<PrimeContext> {
        &self.ctx
    }

    /// The representative `1 + Σ [d_i] π^i` at precision p+1.
    pub fn to_element(&self) -> CycloElement {
        let mut all = Vec::with_capacity(self.digits.len() + 1);
        all.push(self.ctx.residue_field().one());
        all.extend(self.digits.iter().cloned());
        CycloElement::from_digits(&self.ctx, &all).truncate(self.ctx.class_precision())
    }
}

impl PartialEq for UnitClass {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.p() == other.ctx.p() && self.digits == other.digits
    }
}

impl Eq for UnitClass {}

impl Hash for UnitClass {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.p().hash(state);
        self.digits.hash(state);
    }
}

impl PartialOrd for UnitClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for UnitClass {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ctx.p(), &self.digits).cmp(&(other.ctx.p(), &other.digits))
    }
}

impl fmt::Debug for UnitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnitClass{:?}", self.digits)
    }
}

fn digit_list(ctx: &Arc<PrimeContext>, index: u64) -> Vec<ResidueElement> {
    let field = ctx.residue_field();
    let q = field.order().expect("enumerable field") as u64;
    let mut rest = index;
    (0..ctx.p())
        .map(|_| {
            let d = field.element_from_index((rest % q) as u128);
            rest /= q;
            d
        })
        .collect()
}

/// Every digit list at positions `1..=p` whose 1-unit passes
/// [`verify_galois_eigen`], sorted by digit list.
pub fn brute_force_eigenclasses(ctx: &Arc<PrimeContext>, c_gamma: u64) -> Result<Vec<UnitClass>, UnitError> {
    brute_force_eigenclasses_with(ctx, c_gamma, ExecMode::default())
}

pub fn brute_force_eigenclasses_with(
    ctx: &Arc<PrimeContext>,
    c_gamma: u64,
    mode: ExecMode,
) -> Result<Vec<UnitClass>, UnitError> {
    check_c_gamma(ctx, c_gamma)?;
    let count = ctx
        .residue_field()
        .order()
        .and_then(|q| q.checked_pow(ctx.p() as u32))
        .filter(|&c| c <= ENUMERATION_LIMIT)
        .ok_or_else(|| {
            let q = ctx.residue_field().order().unwrap_or(u128::MAX);
            UnitError::EnumerationTooLarge { count: q.saturating_pow(ctx.p() as u32), limit: ENUMERATION_LIMIT }
        })?;
    let results = filter_map_range(mode, count as u64, |i| {
        let class = UnitClass { ctx: ctx.clone(), digits: digit_list(ctx, i) };
        match verify_galois_eigen(&class.to_element(), c_gamma) {
            Ok(true) => Some(Ok(class)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        }
    });
    let mut classes = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    classes.sort();
    Ok(classes)
}

/// Least `n ≥ 1` with `a^n ≡ 1 (mod p)`.
pub fn mult_order(a: u64, p: u64) -> Result<u64, UnitError> {
    let a = a % p;
    if a == 0 {
        return Err(UnitError::ZeroModP { a, p });
    }
    let mut x = a;
    let mut n = 1;
    while x != 1 {
        x = x * a % p;
        n += 1;
    }
    Ok(n)
}

/// A character of `Gal(Q̄_p/Q_p)` on the group generated by Frobenius and the
/// cyclotomic automorphisms: `φ^j σ_u ↦ α^j ω(u)^e` with values in `Z/p^K`,
/// where `ω` is the Teichmuller character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaloisCharacter {
    p: u64,
    modulus: u64,
    frobenius_value: u64,
    cyclotomic_exponent: u64,
}

impl GaloisCharacter {
    pub fn new(ctx: &PrimeContext, frobenius_value: u64, cyclotomic_exponent: i64) -> Result<Self, UnitError> {
        let p = ctx.p();
        if frobenius_value.is_multiple_of(p) {
            return Err(UnitError::ZeroModP { a: frobenius_value, p });
        }
        Ok(GaloisCharacter {
            p,
            modulus: ctx.coefficient_modulus(),
            frobenius_value: frobenius_value % ctx.coefficient_modulus(),
            cyclotomic_exponent: cyclotomic_exponent.rem_euclid(p as i64 - 1) as u64,
        })
    }

    /// The unramified character `λ(α)`.
    pub fn unramified(ctx: &PrimeContext, alpha: u64) -> Result<Self, UnitError> {
        Self::new(ctx, alpha, 0)
    }

    pub fn frobenius_value(&self) -> u64 {
        self.frobenius_value
    }

    pub fn cyclotomic_exponent(&self) -> u64 {
        self.cyclotomic_exponent
    }

    /// Value on `φ^j σ_u`.
    pub fn evaluate(&self, j: u64, u: u64) -> u64 {
        let m = self.modulus;
        let k = m.ilog(self.p);
        let omega = pow_mod(u % m, self.p.pow(k - 1), m);
        let a = pow_mod(self.frobenius_value, j, m);
        let b = pow_mod(omega, self.cyclotomic_exponent, m);
        (a as u128 * b as u128 % m as u128) as u64
    }

    pub fn product(&self, other: &Self) -> Self {
        let m = self.modulus;
        GaloisCharacter {
            p: self.p,
            modulus: m,
            frobenius_value: (self.frobenius_value as u128 * other.frobenius_value as u128 % m as u128) as u64,
            cyclotomic_exponent: (self.cyclotomic_exponent + other.cyclotomic_exponent) % (self.p - 1),
        }
    }
}
