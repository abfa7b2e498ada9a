//! Descent of the Serre–Tate class: solve `w^{φ-1} = q^{(c-1)/p}`, form
//! `q_p = q / w^p`, and decide whether the representation splits.

use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::field::{FiniteField, ResidueElement};
use crate::padic::{CycloElement, PadicError, PrimeContext};
use crate::units::{extract_normal_form, is_pth_power_class, mult_order, EigenNormalForm, UnitError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescentError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Units(#[from] UnitError),
    #[error("x^p - x = a has no solution here; a degree-{required_extension} extension suffices")]
    NoSolution { required_extension: usize },
    #[error("Frobenius equation has no solution at digit {digit}; rerun with n_work = {suggested_n_work}")]
    ExtensionNeeded { digit: usize, suggested_n_work: usize },
    #[error("q is not in the normal-form eigenspace (digit {position})")]
    Inadmissible { position: usize },
    #[error("c_gamma = {c} is not congruent to 1 mod p = {p}")]
    CGammaNotOneModP { c: u64, p: u64 },
    #[error("j_max must be at least 2, got {0}")]
    JMaxTooSmall(usize),
    #[error("descent degree {n} does not divide working degree {n_work}")]
    DegreeMismatch { n: usize, n_work: usize },
    #[error("q / w^p is not fixed by Frobenius at digit {position}")]
    NotFrobeniusFixed { position: usize },
    #[error("cross-check failed: {0}")]
    CrossCheck(&'static str),
    #[error("inner_infty has precision {have}, need at least {need}")]
    InsufficientPrecision { have: usize, need: usize },
    #[error("not in the exceptional case: eps(p) = {eps} but a_p^2 = {ap2} mod p")]
    NotExceptional { eps: u64, ap2: u64 },
}

impl DescentError {
    /// True when the computation would succeed over a larger residue field.
    pub fn needs_extension(&self) -> bool {
        matches!(self, DescentError::NoSolution { .. } | DescentError::ExtensionNeeded { .. })
    }
}

/// `x` with `x^p - x = a`, taking free coordinates 0.
pub fn artin_schreier_solve(field: &FiniteField, a: &ResidueElement) -> Result<ResidueElement, DescentError> {
    field
        .artin_schreier(a)
        .ok_or(DescentError::NoSolution { required_extension: field.p() as usize })
}

/// `w ∈ 1 + πR` with `frobenius(w) / w = target` at the target's precision,
/// built one digit at a time.
pub fn solve_frobenius_equation(target: &CycloElement) -> Result<CycloElement, DescentError> {
    if !target.is_one_unit() {
        return Err(PadicError::NotAOneUnit.into());
    }
    let ctx = target.context();
    let m = target.precision();
    let mut w = CycloElement::one(ctx).truncate(m);
    for pos in 1..m {
        let err = &(target * &w) * &w.frobenius().inverse()?;
        let e = err.digit(pos);
        if e.is_zero() {
            continue;
        }
        let c = artin_schreier_solve(ctx.residue_field(), &e).map_err(|_| DescentError::ExtensionNeeded {
            digit: pos,
            suggested_n_work: ctx.n_work() * ctx.p() as usize,
        })?;
        let step = &CycloElement::one(ctx) + &(&CycloElement::teichmuller(ctx, &c) * &CycloElement::pi_pow(ctx, pos));
        w = (&w * &step).truncate(m);
    }
    debug_assert!(w.frobenius().congruent(&(target * &w), m));
    Ok(w)
}

/// `(c^j - 1) / p` reduced mod `p^{K-1}`, for `c ≡ 1 mod p`.
pub fn descent_exponent(ctx: &PrimeContext, c_gamma: u64, j: u64) -> u64 {
    let m = ctx.coefficient_modulus() as u128;
    let mut cj: u128 = 1;
    for _ in 0..j {
        cj = cj * c_gamma as u128 % m;
    }
    let num = (cj + m - 1) % m;
    debug_assert_eq!(num % ctx.p() as u128, 0);
    (num / ctx.p() as u128) as u64
}

fn check_c_gamma(ctx: &PrimeContext, c_gamma: u64) -> Result<u64, DescentError> {
    if c_gamma % ctx.p() != 1 {
        return Err(DescentError::CGammaNotOneModP { c: c_gamma, p: ctx.p() });
    }
    Ok(c_gamma % ctx.coefficient_modulus())
}

fn require_admissible(q: &CycloElement) -> Result<EigenNormalForm, DescentError> {
    let ext = extract_normal_form(q)?;
    match ext.failing_position {
        Some(position) => Err(DescentError::Inadmissible { position }),
        None => Ok(ext.form),
    }
}

/// First pair `(i, j)` with `1 ≤ i, j ≤ j_max` for which
/// `c(φ^i) · φ^i(c(φ^j)) = c(φ^{i+j})` fails, where `c(φ^j) = q^{(c^j-1)/p}`.
/// Checked at the element's own precision; no admissibility requirement.
pub fn cocycle_identity_defect(
    q: &CycloElement,
    c_gamma: u64,
    j_max: usize,
) -> Result<Option<(usize, usize)>, DescentError> {
    let ctx = q.context();
    let c_gamma = check_c_gamma(ctx, c_gamma)?;
    if j_max < 2 {
        return Err(DescentError::JMaxTooSmall(j_max));
    }
    let cocycle = (0..=2 * j_max)
        .map(|j| q.pow_padic(descent_exponent(ctx, c_gamma, j as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let m = q.precision();
    for i in 1..=j_max {
        for j in 1..=j_max {
            let lhs = &cocycle[i] * &cocycle[j].frobenius_iter(i);
            if !lhs.congruent(&cocycle[i + j], m) {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// The cocycle identity for an admissible `q`.
pub fn verify_cocycle(q: &CycloElement, c_gamma: u64, j_max: usize) -> Result<bool, DescentError> {
    require_admissible(q)?;
    Ok(cocycle_identity_defect(q, c_gamma, j_max)?.is_none())
}

/// `a_p` and `ε(p)` of the lifted form, as integers mod `p^K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftedFormData {
    pub a_p: u64,
    pub epsilon_p: u64,
}

impl LiftedFormData {
    fn check(&self, p: u64) -> Result<(), DescentError> {
        let ap2 = self.a_p % p * (self.a_p % p) % p;
        if self.a_p.is_multiple_of(p) || self.epsilon_p % p != ap2 {
            return Err(DescentError::NotExceptional { eps: self.epsilon_p % p, ap2 });
        }
        Ok(())
    }

    /// `c_gamma = a_p² / ε(p)` mod `p^K`.
    pub fn c_gamma(&self, ctx: &PrimeContext) -> Result<u64, DescentError> {
        self.check(ctx.p())?;
        let m = ctx.coefficient_modulus();
        let a = self.a_p % m;
        let inv = crate::fp_poly::inv_mod(self.epsilon_p % m, m).ok_or(PadicError::NotAUnit)?;
        Ok((a as u128 * a as u128 % m as u128 * inv as u128 % m as u128) as u64)
    }

    /// Order of `a_p` in `F_p^*`.
    pub fn descent_degree(&self, p: u64) -> Result<usize, DescentError> {
        self.check(p)?;
        Ok(mult_order(self.a_p, p)? as usize)
    }
}

#[derive(Debug, Clone)]
pub struct DescentProblem {
    q: CycloElement,
    c_gamma: u64,
    n: usize,
    form: EigenNormalForm,
}

impl DescentProblem {
    pub fn new(q: CycloElement, c_gamma: u64, n: usize) -> Result<Self, DescentError> {
        let ctx = q.context().clone();
        let c_gamma = check_c_gamma(&ctx, c_gamma)?;
        let form = require_admissible(&q)?;
        if n == 0 || !ctx.n_work().is_multiple_of(n) {
            return Err(DescentError::DegreeMismatch { n, n_work: ctx.n_work() });
        }
        Ok(DescentProblem { q, c_gamma, n, form })
    }

    pub fn q(&self) -> &CycloElement {
        &self.q
    }

    pub fn c_gamma(&self) -> u64 {
        self.c_gamma
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn normal_form(&self) -> EigenNormalForm {
        self.form
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentDiagnostics {
    pub working_precision: usize,
    pub class_precision: usize,
    pub working_degree: usize,
    pub descent_degree: usize,
    pub exponent: u64,
    /// Whether the direct solve of `w^{φ-1} = q^e` ran as a cross-check.
    pub direct_route_checked: bool,
}

#[derive(Debug, Clone)]
pub struct DescentResult {
    pub w: CycloElement,
    pub q_p: CycloElement,
    pub nf_q: EigenNormalForm,
    pub nf_qp: EigenNormalForm,
    pub diagnostics: DescentDiagnostics,
}

/// Solutions `u`, `v` of `u^{φ-1} = ζ` and `v^{φ-1} = 1 + π^p`, computed
/// on first use and reused across problems in the same context.
#[derive(Debug, Clone)]
pub struct DescentGenerators {
    ctx: Arc<PrimeContext>,
    u: OnceLock<Result<CycloElement, DescentError>>,
    v: OnceLock<Result<CycloElement, DescentError>>,
}

impl DescentGenerators {
    pub fn new(ctx: &Arc<PrimeContext>) -> Self {
        DescentGenerators { ctx: ctx.clone(), u: OnceLock::new(), v: OnceLock::new() }
    }

    pub fn u(&self) -> Result<&CycloElement, DescentError> {
        self.u
            .get_or_init(|| solve_frobenius_equation(&CycloElement::zeta(&self.ctx)))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn v(&self) -> Result<&CycloElement, DescentError> {
        self.v
            .get_or_init(|| {
                let one = CycloElement::one(&self.ctx);
                solve_frobenius_equation(&(&one + &CycloElement::pi_pow(&self.ctx, self.ctx.p() as usize)))
            })
            .as_ref()
            .map_err(Clone::clone)
    }
}

pub fn qp_from_q(problem: &DescentProblem) -> Result<DescentResult, DescentError> {
    qp_from_q_with(problem, &DescentGenerators::new(problem.q.context()))
}

/// [`qp_from_q`] reusing precomputed generators for the problem's context.
pub fn qp_from_q_with(problem: &DescentProblem, gens: &DescentGenerators) -> Result<DescentResult, DescentError> {
    let q = &problem.q;
    if !gens.ctx.same_as(q.context()) {
        return Err(PadicError::ContextMismatch.into());
    }
    let ctx = q.context().clone();
    let p = ctx.p();
    let mc = ctx.class_precision();
    let nf = problem.form;
    let e = descent_exponent(&ctx, problem.c_gamma, 1);

    let mut base = CycloElement::one(&ctx);
    if e != 0 && nf.s() != 0 {
        base = &base * &gens.u()?.pow(nf.s());
    }
    if e != 0 && nf.t() != 0 {
        base = &base * &gens.v()?.pow(nf.t());
    }
    let w = base.pow_padic(e)?;
    let q_pow = q.pow_padic(e)?;
    if !w.frobenius().congruent(&(&q_pow * &w), mc) {
        return Err(DescentError::CrossCheck("frobenius(w)/w differs from q^e"));
    }
    let q_p = (q * &w.pow(p).inverse()?).truncate(mc);

    let fixed = q_p.frobenius();
    if !fixed.congruent(&q_p, mc) {
        let position = (0..mc).find(|&i| !fixed.congruent(&q_p, i + 1)).unwrap_or(0);
        return Err(DescentError::NotFrobeniusFixed { position });
    }

    let closed = EigenNormalForm::new(p, nf.s() as i64, (nf.t() as u128 + nf.s() as u128 * e as u128 % p as u128) as i64)
        .to_element(&ctx);
    if !closed.congruent(&q_p, mc) {
        return Err(DescentError::CrossCheck("q/w^p differs from the closed form"));
    }

    let direct_route_checked = match solve_frobenius_equation(&q_pow) {
        Ok(w_direct) => {
            let alt = q * &w_direct.pow(p).inverse()?;
            if !alt.congruent(&q_p, mc) {
                return Err(DescentError::CrossCheck("direct and closed-form routes disagree"));
            }
            true
        }
        Err(err) if err.needs_extension() => false,
        Err(err) => return Err(err),
    };

    let descended = q_p.descend_subfield(problem.n)?;
    let nf_qp = require_admissible(&descended)?;
    Ok(DescentResult {
        w,
        q_p: descended,
        nf_q: nf,
        nf_qp,
        diagnostics: DescentDiagnostics {
            working_precision: ctx.precision(),
            class_precision: mc,
            working_degree: ctx.n_work(),
            descent_degree: problem.n,
            exponent: e,
            direct_route_checked,
        },
    })
}

/// Which half of the splitting criterion failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailedCondition {
    /// `v_π((ω_F, ω_{F|w})_∞) < p + 1`.
    InnerProduct { valuation: usize },
    /// `⟨[f], [f']⟩_I ≠ 0`.
    CupProduct,
    /// `q_p` is not a p-th power.
    NontrivialClass,
}

#[derive(Debug, Clone)]
pub enum VerdictSource {
    Invariants { inner_infty: CycloElement, cup_i: ResidueElement },
    SerreTate { q: CycloElement, c_gamma: u64, n: usize },
}

#[derive(Debug, Clone)]
pub struct SplittingVerdict {
    pub split: bool,
    pub s: Option<u64>,
    pub t: Option<u64>,
    pub failed: Vec<FailedCondition>,
    pub descent: Option<DescentResult>,
}

pub fn splitting_verdict(source: &VerdictSource) -> Result<SplittingVerdict, DescentError> {
    match source {
        VerdictSource::Invariants { inner_infty, cup_i } => {
            let ctx = inner_infty.context();
            let need = ctx.class_precision();
            if inner_infty.precision() < need {
                return Err(DescentError::InsufficientPrecision { have: inner_infty.precision(), need });
            }
            let field = ctx.residue_field();
            let x = inner_infty.truncate(need);
            let mut failed = Vec::new();
            let valuation = x.valuation();
            if valuation < need {
                failed.push(FailedCondition::InnerProduct { valuation });
            }
            if !cup_i.is_zero() {
                failed.push(FailedCondition::CupProduct);
            }
            let s = field.prime_field_value(cup_i);
            let t = if cup_i.is_zero() {
                // below π^p the invariant is nonzero only off the normal form
                (valuation >= ctx.p() as usize).then(|| field.prime_field_value(&x.digit(ctx.p() as usize))).flatten()
            } else {
                None
            };
            Ok(SplittingVerdict { split: failed.is_empty(), s, t, failed, descent: None })
        }
        VerdictSource::SerreTate { q, c_gamma, n } => {
            let problem = DescentProblem::new(q.clone(), *c_gamma, *n)?;
            let result = qp_from_q(&problem)?;
            let split = is_pth_power_class(&result.nf_qp);
            Ok(SplittingVerdict {
                split,
                s: Some(result.nf_qp.s()),
                t: Some(result.nf_qp.t()),
                failed: if split { vec![] } else { vec![FailedCondition::NontrivialClass] },
                descent: Some(result),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::default_context;

    #[test]
    fn artin_schreier_examples() {
        let f1 = FiniteField::new(3, 1).unwrap();
        assert_eq!(artin_schreier_solve(&f1, &f1.zero()).unwrap(), f1.zero());
        assert_eq!(
            artin_schreier_solve(&f1, &f1.from_i64(-1)),
            Err(DescentError::NoSolution { required_extension: 3 })
        );
        let f3 = FiniteField::new(3, 3).unwrap();
        let a = f3.from_i64(-1);
        let x = artin_schreier_solve(&f3, &a).unwrap();
        assert_eq!(f3.sub(&f3.pow(&x, 3), &x), a);
    }

    #[test]
    fn frobenius_equation_trivial_target() {
        let ctx = default_context(5, 1).unwrap();
        let w = solve_frobenius_equation(&CycloElement::one(&ctx)).unwrap();
        assert_eq!(w, CycloElement::one(&ctx));
    }

    #[test]
    fn zeta_needs_degree_divisible_by_p() {
        let ctx = default_context(3, 1).unwrap();
        let err = solve_frobenius_equation(&CycloElement::zeta(&ctx)).unwrap_err();
        assert_eq!(err, DescentError::ExtensionNeeded { digit: 1, suggested_n_work: 3 });
        let ctx = default_context(3, 3).unwrap();
        let u = solve_frobenius_equation(&CycloElement::zeta(&ctx)).unwrap();
        assert!(u.frobenius().congruent(&(&CycloElement::zeta(&ctx) * &u), ctx.precision()));
    }

    #[test]
    fn descent_exponent_for_c4() {
        let ctx = default_context(3, 1).unwrap();
        assert_eq!(descent_exponent(&ctx, 4, 1), 1);
        assert_eq!(descent_exponent(&ctx, 4, 2), 5);
        assert_eq!(descent_exponent(&ctx, 1, 3), 0);
    }

    #[test]
    fn trivial_c_gamma_leaves_q_alone() {
        let ctx = default_context(5, 1).unwrap();
        let q = EigenNormalForm::new(5, 3, 1).to_element(&ctx);
        let r = qp_from_q(&DescentProblem::new(q.clone(), 1, 1).unwrap()).unwrap();
        assert_eq!(r.w, CycloElement::one(&ctx));
        assert_eq!(r.nf_qp, r.nf_q);
        assert!(r.q_p.congruent(&q, 6));
    }

    #[test]
    fn lifted_form_data() {
        let ctx = default_context(5, 1).unwrap();
        let d = LiftedFormData { a_p: 2, epsilon_p: 4 };
        assert_eq!(d.c_gamma(&ctx).unwrap(), 1);
        assert_eq!(d.descent_degree(5).unwrap(), 4);
        let bad = LiftedFormData { a_p: 2, epsilon_p: 1 };
        assert!(matches!(bad.c_gamma(&ctx), Err(DescentError::NotExceptional { .. })));
    }

    #[test]
    fn invariant_mode_examples() {
        let ctx = default_context(5, 1).unwrap();
        let f = ctx.residue_field();
        let zero = CycloElement::zero(&ctx);
        let v = splitting_verdict(&VerdictSource::Invariants { inner_infty: zero.clone(), cup_i: f.zero() }).unwrap();
        assert!(v.split);
        let v = splitting_verdict(&VerdictSource::Invariants { inner_infty: zero, cup_i: f.one() }).unwrap();
        assert!(!v.split);
        assert_eq!(v.failed, vec![FailedCondition::CupProduct]);
        let pp = CycloElement::pi_pow(&ctx, 5);
        let v = splitting_verdict(&VerdictSource::Invariants { inner_infty: pp, cup_i: f.zero() }).unwrap();
        assert!(!v.split);
        assert_eq!((v.s, v.t), (Some(0), Some(1)));
    }
}
