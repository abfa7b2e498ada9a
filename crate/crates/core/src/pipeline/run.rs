use std::path::Path;
use std::sync::Arc;

use serde_json::Value;

use super::job::{parse_job, FormBlock, JobError, JobSpec, Mode};
use super::report::{digest, Verdict, VerdictReport};
use crate::descent::{qp_from_q, splitting_verdict, DescentError, DescentProblem, FailedCondition, VerdictSource};
use crate::exec::ExecMode;
use crate::field::{Embedding, FieldError, FiniteField, ResidueElement};
use crate::modforms::{
    companion_check, exceptional_check, read_exchange, theta, theta_pow, DirichletCharacter, ModFormError,
    ModFormModP, QExpansion,
};
use crate::padic::{make_context, CycloElement, PadicError, PrimeContext};
use crate::units::{extract_normal_form, is_pth_power_class, mult_order, UnitError};

/// Exit codes of the command-line front end.
pub mod exit {
    pub const OK: i32 = 0;
    pub const PARSE: i32 = 1;
    pub const PRECONDITION: i32 = 2;
    pub const EXTENSION_NEEDED: i32 = 3;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub report: VerdictReport,
    pub exit_code: i32,
}

/// Command-line overrides applied to the document before validation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub precision: Option<usize>,
    pub n_work: Option<usize>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    reason: String,
}

impl Failure {
    fn precondition(reason: impl Into<String>) -> Self {
        Failure { code: exit::PRECONDITION, reason: reason.into() }
    }
}

impl From<DescentError> for Failure {
    fn from(e: DescentError) -> Self {
        let code = if e.needs_extension() { exit::EXTENSION_NEEDED } else { exit::PRECONDITION };
        Failure { code, reason: e.to_string() }
    }
}

macro_rules! precondition_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::precondition(e.to_string())
            }
        }
    )*};
}
precondition_from!(PadicError, UnitError, FieldError);

impl From<ModFormError> for Failure {
    fn from(e: ModFormError) -> Self {
        let code = if matches!(e, ModFormError::Parse { .. }) { exit::PARSE } else { exit::PRECONDITION };
        Failure { code, reason: e.to_string() }
    }
}

/// Parses, validates and runs one job document. Form files named in the
/// document are resolved against `base_dir`.
pub fn run_document(document: &[u8], mode_hint: Option<Mode>, base_dir: &Path, overrides: Overrides) -> RunOutcome {
    let failed = |err: JobError| {
        let mut report = VerdictReport::new(mode_hint, digest(document));
        report.fail(err.to_string());
        RunOutcome { report, exit_code: err.exit_code() }
    };
    let patched;
    let mut bytes = document;
    if overrides != Overrides::default() {
        let mut value: Value = match std::str::from_utf8(document).ok().and_then(|t| serde_json::from_str(t).ok()) {
            Some(v) => v,
            None => return failed(parse_job(document, mode_hint).unwrap_err()),
        };
        if let Some(obj) = value.as_object_mut() {
            if let Some(m) = overrides.precision {
                obj.insert("precision".into(), m.into());
            }
            if let Some(n) = overrides.n_work {
                obj.insert("n_work".into(), n.into());
            }
        }
        patched = value.to_string();
        bytes = patched.as_bytes();
    }
    match parse_job(bytes, mode_hint) {
        Ok(spec) => run_job(&spec, base_dir),
        Err(err) => failed(err),
    }
}

/// Runs a validated job.
pub fn run_job(spec: &JobSpec, base_dir: &Path) -> RunOutcome {
    let mut report = VerdictReport::new(Some(spec.mode), digest(spec.to_json().as_bytes()));
    let result = match spec.mode {
        Mode::NormalForm => normal_form(spec, &mut report),
        Mode::QpFromQ => descent(spec, base_dir, &mut report),
        Mode::Verdict => verdict(spec, base_dir, &mut report),
        Mode::Companion => companion(spec, base_dir, &mut report),
        Mode::Exceptional => exceptional(spec, base_dir, &mut report),
        Mode::Selftest => selftest(&mut report),
    };
    match result {
        Ok(()) => RunOutcome { report, exit_code: exit::OK },
        Err(f) => {
            report.s = None;
            report.t = None;
            report.fail(f.reason);
            RunOutcome { report, exit_code: f.code }
        }
    }
}

fn context(spec: &JobSpec, n_work: usize) -> Result<Arc<PrimeContext>, Failure> {
    let m = spec.precision.unwrap_or(spec.p as usize + 2);
    Ok(make_context(spec.p, n_work, m)?)
}

fn embed(ctx: &Arc<PrimeContext>, digits: &[Vec<u64>]) -> Result<Vec<ResidueElement>, Failure> {
    let d = digits.first().map_or(1, Vec::len);
    let sub = FiniteField::new(ctx.p(), d)?;
    let emb = Embedding::new(&sub, ctx.residue_field())?;
    Ok(digits.iter().map(|v| emb.map(&sub.from_coeffs(v))).collect())
}

fn one_unit(ctx: &Arc<PrimeContext>, q_digits: &[Vec<u64>]) -> Result<CycloElement, Failure> {
    let mut digits = vec![ctx.residue_field().one()];
    digits.extend(embed(ctx, q_digits)?);
    Ok(CycloElement::from_digits(ctx, &digits))
}

fn set_verdict(report: &mut VerdictReport, split: bool) {
    report.verdict = Some(if split { Verdict::Split } else { Verdict::NotSplit });
}

fn normal_form(spec: &JobSpec, report: &mut VerdictReport) -> Result<(), Failure> {
    let n_work = spec.n_work.unwrap_or(spec.input_degree());
    let ctx = context(spec, n_work)?;
    report.precision_used = Some(ctx.precision());
    report.extension_degree_used = Some(n_work);
    let q = one_unit(&ctx, spec.q_digits.as_deref().unwrap_or_default())?;
    let ext = extract_normal_form(&q)?;
    if let Some(pos) = ext.failing_position {
        return Err(Failure::precondition(format!(
            "q is not admissible: digit {pos} rules out the form zeta^s (1+pi^p)^t"
        )));
    }
    let nf = ext.form;
    report.s = Some(nf.s());
    report.t = Some(nf.t());
    let trivial = is_pth_power_class(&nf);
    set_verdict(report, trivial);
    report.checks.push(format!("q = zeta^{} (1+pi^{})^{} mod pi^{}", nf.s(), spec.p, nf.t(), spec.p + 1));
    report.checks.push(format!("class of q is {}", if trivial { "trivial" } else { "nontrivial" }));
    report.summary = format!("normal form {nf}");
    Ok(())
}

fn load_form(block: &FormBlock, p: u64, base_dir: &Path) -> Result<ModFormModP, Failure> {
    if let Some(path) = &block.qexp {
        let full = base_dir.join(path);
        let text = std::fs::read_to_string(&full)
            .map_err(|e| Failure::precondition(format!("cannot read {}: {e}", full.display())))?;
        let f = read_exchange(&text)?;
        if f.p() != p {
            return Err(Failure::precondition(format!("{path} is a mod-{} form, job has p = {p}", f.p())));
        }
        return Ok(f);
    }
    let field = Arc::new(FiniteField::new(p, block.m.unwrap_or(1))?);
    let vals = |v: &[Vec<u64>]| v.iter().map(|c| field.from_coeffs(c)).collect::<Vec<_>>();
    let character = DirichletCharacter::new(field.clone(), vals(block.character.as_deref().unwrap_or_default()))?;
    let qexp = QExpansion::new(field.clone(), vals(block.coefficients.as_deref().unwrap_or_default()));
    Ok(ModFormModP::new(qexp, block.k.unwrap_or(1), block.level.unwrap_or(1), character)?)
}

fn a_p_of(f: &ModFormModP) -> Result<ResidueElement, Failure> {
    let p = f.p() as usize;
    if f.bound() < p {
        return Err(Failure::precondition(format!("form is known only to q^{}, need a_{p}", f.bound())));
    }
    Ok(f.qexp().coeff(p).clone())
}

/// Descent degree and working degree for the Serre–Tate route.
fn degrees(spec: &JobSpec, base_dir: &Path, report: &mut VerdictReport) -> Result<(usize, usize), Failure> {
    let n = match &spec.form {
        Some(block) => {
            let f = load_form(block, spec.p, base_dir)?;
            let a_p = a_p_of(&f)?;
            let a = f
                .field()
                .prime_field_value(&a_p)
                .filter(|&a| a != 0)
                .ok_or_else(|| Failure::precondition("a_p must be a nonzero element of F_p"))?;
            let n = mult_order(a, spec.p)? as usize;
            report.checks.push(format!("a_p = {a} has order {n} in F_{}^*", spec.p));
            n
        }
        None => 1,
    };
    let d = spec.input_degree();
    let n_work = spec.n_work.unwrap_or(num_integer::lcm(n, d) * spec.p as usize);
    if !n_work.is_multiple_of(n) || !n_work.is_multiple_of(d) {
        return Err(Failure::precondition(format!("n_work = {n_work} must be a multiple of {n} and {d}")));
    }
    Ok((n, n_work))
}

fn descent(spec: &JobSpec, base_dir: &Path, report: &mut VerdictReport) -> Result<(), Failure> {
    let (n, n_work) = degrees(spec, base_dir, report)?;
    let ctx = context(spec, n_work)?;
    report.precision_used = Some(ctx.precision());
    report.extension_degree_used = Some(n_work);
    let q = one_unit(&ctx, spec.q_digits.as_deref().unwrap_or_default())?;
    let c_gamma = spec.c_gamma.unwrap_or(1);
    let problem = DescentProblem::new(q, c_gamma, n)?;
    let nf_q = problem.normal_form();
    report.checks.push(format!("normal form of q: {nf_q}"));
    let r = qp_from_q(&problem)?;
    let d = &r.diagnostics;
    report.checks.push(format!("exponent (c_gamma - 1)/p = {} mod p^{}", d.exponent, ctx.coefficient_exponent() - 1));
    report.checks.push(format!("frobenius(w)/w = q^e mod pi^{}", d.class_precision));
    report.checks.push(format!("q/w^p is frobenius-fixed and descends to degree {n}"));
    report.checks.push("closed form zeta^s (1+pi^p)^(t + s e) agrees".into());
    report.checks.push(if d.direct_route_checked {
        "direct solve of w^(phi-1) = q^e agrees".into()
    } else {
        "direct solve skipped: needs a larger residue field".into()
    });
    report.checks.push(format!("normal form of q_p: {}", r.nf_qp));
    report.s = Some(r.nf_qp.s());
    report.t = Some(r.nf_qp.t());
    let split = is_pth_power_class(&r.nf_qp);
    set_verdict(report, split);
    report.summary = format!(
        "q_p = zeta^{} (1+pi^{})^{}: {}",
        r.nf_qp.s(),
        spec.p,
        r.nf_qp.t(),
        if split { "split" } else { "not split" }
    );
    Ok(())
}

fn verdict(spec: &JobSpec, base_dir: &Path, report: &mut VerdictReport) -> Result<(), Failure> {
    let (Some(inner), Some(cup)) = (&spec.inner_infty_digits, &spec.cup_i) else {
        descent(spec, base_dir, report)?;
        report.checks.insert(0, "source: Serre-Tate invariant q".into());
        return Ok(());
    };
    let n_work = spec.n_work.unwrap_or(spec.input_degree());
    let ctx = context(spec, n_work)?;
    report.precision_used = Some(ctx.precision());
    report.extension_degree_used = Some(n_work);
    let inner_el = CycloElement::from_digits(&ctx, &embed(&ctx, inner)?).truncate(inner.len());
    let cup_el = embed(&ctx, std::slice::from_ref(cup))?.remove(0);
    let v = splitting_verdict(&VerdictSource::Invariants { inner_infty: inner_el, cup_i: cup_el })?;
    report.checks.push("source: inner product at infinity and cup product".into());
    for f in &v.failed {
        report.checks.push(match f {
            FailedCondition::InnerProduct { valuation } => {
                format!("inner product has valuation {valuation} < {}", spec.p + 1)
            }
            FailedCondition::CupProduct => "cup product is nonzero".into(),
            FailedCondition::NontrivialClass => "q_p is not a p-th power".into(),
        });
    }
    if v.split {
        report.checks.push(format!("inner product vanishes mod pi^{} and cup product is 0", spec.p + 1));
    }
    report.s = v.s;
    report.t = v.t;
    set_verdict(report, v.split);
    report.summary = if v.split { "split".into() } else { "not split".into() };
    Ok(())
}

fn companion(spec: &JobSpec, base_dir: &Path, report: &mut VerdictReport) -> Result<(), Failure> {
    let f = load_form(spec.form.as_ref().expect("validated"), spec.p, base_dir)?;
    let g = load_form(spec.companion_form.as_ref().expect("validated"), spec.p, base_dir)?;
    let bound = f.bound().min(g.bound());
    let k_dual = spec.p + 1 - (f.weight() as u64).min(spec.p + 1);
    if companion_check(&f, &g, bound)? {
        report.checks.push(format!("theta g = theta^{k_dual} f through q^{bound}"));
        let mirrored = theta(&f).qexp().first_difference(theta_pow(&g, f.weight()).qexp(), bound);
        report.checks.push(match mirrored {
            None => format!("theta f = theta^{} g through q^{bound}", f.weight()),
            Some(n) => format!("theta f and theta^{} g differ at q^{n}", f.weight()),
        });
        report.summary = format!("companion relation holds to bound {bound}");
    } else {
        let n = theta(&g).qexp().first_difference(theta_pow(&f, k_dual as u32).qexp(), bound).unwrap_or(0);
        report.checks.push(format!("theta g and theta^{k_dual} f differ at q^{n}"));
        report.summary = format!("companion relation fails at q^{n}");
    }
    Ok(())
}

fn exceptional(spec: &JobSpec, base_dir: &Path, report: &mut VerdictReport) -> Result<(), Failure> {
    let f = load_form(spec.form.as_ref().expect("validated"), spec.p, base_dir)?;
    let a_p = a_p_of(&f)?;
    let field = f.field();
    let eps_p = f.character().eval(spec.p);
    let yes = |b: bool| if b { "yes" } else { "no" };
    report.checks.push(format!("a_p = {a_p} (ordinary: {})", yes(!a_p.is_zero())));
    report.checks.push(format!("k = {} (k = p: {})", f.weight(), yes(f.weight() as u64 == spec.p)));
    let sq = field.mul(&a_p, &a_p);
    report.checks.push(format!("eps(p) = {eps_p}, a_p^2 = {sq} (equal: {})", yes(eps_p == sq)));
    report.summary = if exceptional_check(&f, &a_p) {
        "exceptional case: ordinary, k = p and eps(p) = a_p^2".into()
    } else {
        "not in the exceptional case".into()
    };
    Ok(())
}

fn selftest(report: &mut VerdictReport) -> Result<(), Failure> {
    let results = crate::selftest::run_all(ExecMode::default());
    let passed = results.iter().filter(|r| r.passed).count();
    for r in &results {
        report.checks.push(format!("{}: {} ({})", if r.passed { "pass" } else { "FAIL" }, r.name, r.detail));
    }
    if passed != results.len() {
        return Err(Failure::precondition(format!("{} of {} self-test checks failed", results.len() - passed, results.len())));
    }
    report.summary = format!("self-test: {passed}/{} checks passed", results.len());
    Ok(())
}
