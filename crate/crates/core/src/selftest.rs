//! Built-in oracle suite behind the `selftest` mode. Each check is exact and
//! deterministic (seeded RNG); independent checks run in parallel.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::descent::{
    cocycle_identity_defect, qp_from_q_with, splitting_verdict, verify_cocycle, DescentGenerators, DescentProblem,
    VerdictSource,
};
use crate::exec::{map_range, ExecMode};
use crate::field::FiniteField;
use crate::modforms::{
    companion_check, eisenstein_with, exceptional_check, hecke, theta, theta_pow, DirichletCharacter, HeckeOperator,
    ModFormModP,
};
use crate::padic::{default_context, make_context, CycloElement, PrimeContext};
use crate::pipeline::{emit_report, run_document, Format, Mode, Overrides};
use crate::units::{brute_force_eigenclasses_with, is_pth_power_class, EigenNormalForm, UnitClass};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(ExecMode) -> Result<String, String>;

const CHECKS: [(&str, Check); 10] = [
    ("eigenclass enumeration", eigenclasses),
    ("frobenius generators", generators),
    ("descent closed form", descent_closed_form),
    ("cocycle identity", cocycle),
    ("splitting lemma", splitting_lemma),
    ("log and dlog", log_dlog),
    ("p-th power law", pth_power_law),
    ("theta and hecke", theta_hecke),
    ("eisenstein companions", eisenstein_companions),
    ("golden jobs", golden_jobs),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs every check; results come back in a fixed order.
pub fn run_all(mode: ExecMode) -> Vec<CheckResult> {
    map_range(mode, CHECKS.len() as u64, |i| {
        let (name, check) = CHECKS[i as usize];
        match check(mode) {
            Ok(detail) => CheckResult { name, passed: true, detail },
            Err(detail) => CheckResult { name, passed: false, detail },
        }
    })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ctx(p: u64, n: usize) -> Result<Arc<PrimeContext>, String> {
    default_context(p, n).map_err(|e| e.to_string())
}

fn one_plus_pi_p(ctx: &Arc<PrimeContext>) -> CycloElement {
    &CycloElement::one(ctx) + &CycloElement::pi_pow(ctx, ctx.p() as usize)
}

fn eigenclasses(mode: ExecMode) -> Result<String, String> {
    for (p, n) in [(3, 1), (3, 2), (5, 1)] {
        let ctx = ctx(p, n)?;
        let got = brute_force_eigenclasses_with(&ctx, 1, mode).map_err(|e| e.to_string())?;
        let want: BTreeSet<UnitClass> = (0..p)
            .flat_map(|s| (0..p).map(move |t| (s, t)))
            .map(|(s, t)| UnitClass::of(&EigenNormalForm::new(p, s as i64, t as i64).to_element(&ctx)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        ensure(got.len() == (p * p) as usize, || format!("p={p} n={n}: {} classes", got.len()))?;
        ensure(got.into_iter().collect::<BTreeSet<_>>() == want, || format!("p={p} n={n}: wrong classes"))?;
    }
    Ok("9, 9 and 25 classes".into())
}

fn generators(_: ExecMode) -> Result<String, String> {
    for p in [3, 5, 7] {
        let ctx = ctx(p, p as usize)?;
        let gens = DescentGenerators::new(&ctx);
        let u = gens.u().map_err(|e| e.to_string())?;
        let v = gens.v().map_err(|e| e.to_string())?;
        let m = p as usize + 1;
        let one = CycloElement::one(&ctx);
        ensure((&u.pow(p) * &one_plus_pi_p(&ctx)).congruent(&one, m), || format!("p={p}: u^p (1+pi^p) != 1"))?;
        ensure(v.pow(p).congruent(&one, m), || format!("p={p}: v^p != 1"))?;
    }
    Ok("p = 3, 5, 7".into())
}

fn descent_closed_form(mode: ExecMode) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut jobs = Vec::new();
    for p in [3u64, 5, 7] {
        let cs: Vec<u64> = (0..10).map(|_| 1 + p * rng.random_range(0..p * p * p)).collect();
        jobs.push((p, cs));
    }
    let runs = map_range(mode, jobs.len() as u64, |i| -> Result<usize, String> {
        let (p, cs) = &jobs[i as usize];
        let p = *p;
        let ctx = ctx(p, p as usize)?;
        let gens = DescentGenerators::new(&ctx);
        let mut count = 0;
        for s in 0..p {
            for t in 0..p {
                let q = EigenNormalForm::new(p, s as i64, t as i64).to_element(&ctx);
                for &c in cs {
                    let problem = DescentProblem::new(q.clone(), c, 1).map_err(|e| e.to_string())?;
                    let r = qp_from_q_with(&problem, &gens).map_err(|e| e.to_string())?;
                    let e = (c - 1) / p % p;
                    let want = EigenNormalForm::new(p, s as i64, (t + s * e) as i64);
                    ensure(r.nf_qp == want, || format!("p={p} (s,t)=({s},{t}) c={c}: got {}", r.nf_qp))?;
                    count += 1;
                }
            }
        }
        Ok(count)
    });
    let total: usize = runs.into_iter().sum::<Result<usize, String>>()?;
    Ok(format!("{total} descents"))
}

fn cocycle(_: ExecMode) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for i in 0..50 {
        let p = [3u64, 5, 7][i % 3];
        let n = rng.random_range(1..=2);
        let ctx = ctx(p, n)?;
        let (s, t) = (rng.random_range(0..p), rng.random_range(0..p));
        // a tail outside F_p would break Frobenius invariance at digit p + 1
        let tail = ctx.residue_field().from_u64(rng.random_range(0..p));
        let q = &EigenNormalForm::new(p, s as i64, t as i64).to_element(&ctx)
            * &(&CycloElement::one(&ctx) + &(&CycloElement::teichmuller(&ctx, &tail) * &CycloElement::pi_pow(&ctx, p as usize + 1)));
        let c = 1 + p * rng.random_range(0..p * p);
        let ok = verify_cocycle(&q, c, 4).map_err(|e| e.to_string())?;
        ensure(ok, || format!("p={p} (s,t)=({s},{t}) c={c}: identity fails"))?;
    }
    for p in [3u64, 5, 7] {
        let ctx = ctx(p, 1)?;
        let bad = &CycloElement::one(&ctx) + &CycloElement::pi_pow(&ctx, 2);
        ensure(verify_cocycle(&bad, 1 + p, 4).is_err(), || format!("p={p}: 1+pi^2 accepted"))?;
        let defect = cocycle_identity_defect(&bad, 1 + p, 4).map_err(|e| e.to_string())?;
        ensure(defect.is_some(), || format!("p={p}: 1+pi^2 satisfies the identity"))?;
    }
    Ok("50 admissible pairs, 3 rejections".into())
}

fn splitting_lemma(_: ExecMode) -> Result<String, String> {
    let p = 3u64;
    let small = make_context(p, 2, p as usize + 1).map_err(|e| e.to_string())?;
    let field = small.residue_field();
    let mut powers = BTreeSet::new();
    let order = field.order().expect("small field");
    for idx in 0..order.pow(p as u32) {
        let mut rest = idx;
        let mut digits = vec![field.one()];
        for _ in 0..p {
            digits.push(field.element_from_index(rest % order));
            rest /= order;
        }
        let x = CycloElement::from_digits(&small, &digits);
        powers.insert(UnitClass::of(&x.pow(p)).map_err(|e| e.to_string())?);
    }
    let ctx = ctx(p, p as usize)?;
    for s in 0..p {
        for t in 0..p {
            let q = EigenNormalForm::new(p, s as i64, t as i64).to_element(&ctx);
            let v = splitting_verdict(&VerdictSource::SerreTate { q, c_gamma: 1, n: 1 }).map_err(|e| e.to_string())?;
            let nf = EigenNormalForm::new(p, s as i64, t as i64);
            let is_power = powers.contains(&UnitClass::of(&nf.to_element(&small)).map_err(|e| e.to_string())?);
            ensure(v.split == (s == 0 && t == 0), || format!("(s,t)=({s},{t}): verdict {}", v.split))?;
            ensure(is_power == v.split && is_pth_power_class(&nf) == v.split, || format!("(s,t)=({s},{t}): search disagrees"))?;
        }
    }
    Ok(format!("{} p-th powers mod pi^4 over F_9", powers.len()))
}

fn random_one_unit(rng: &mut ChaCha8Rng, ctx: &Arc<PrimeContext>) -> CycloElement {
    let field = ctx.residue_field();
    let order = field.order().unwrap_or(u64::MAX as u128);
    let mut digits = vec![field.one()];
    digits.extend((1..ctx.precision()).map(|_| field.element_from_index(rng.random_range(0..order))));
    CycloElement::from_digits(ctx, &digits)
}

fn log_dlog(_: ExecMode) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let err = |e: crate::padic::PadicError| e.to_string();
    for p in [3u64, 5, 7] {
        let ctx = ctx(p, 2)?;
        let field = ctx.residue_field();
        let zeta = CycloElement::zeta(&ctx);
        for s in 0..p {
            let d = zeta.pow(s).dlog_mod_pi().map_err(err)?;
            ensure(d == field.from_i64(-(s as i64)), || format!("p={p}: dlog zeta^{s} = {}", field.display(&d)))?;
        }
        for t in 0..p {
            let l = one_plus_pi_p(&ctx).pow(t).log_one_unit().map_err(err)?;
            ensure(l.digit(p as usize) == field.from_u64(t), || format!("p={p}: digit_p log (1+pi^p)^{t}"))?;
        }
        for _ in 0..200 / 3 + 1 {
            let a = random_one_unit(&mut rng, &ctx);
            let b = random_one_unit(&mut rng, &ctx);
            let lhs = (&a * &b).log_one_unit().map_err(err)?;
            let rhs = &a.log_one_unit().map_err(err)? + &b.log_one_unit().map_err(err)?;
            ensure(lhs.congruent(&rhs, lhs.precision().min(rhs.precision())), || format!("p={p}: log(ab) != log a + log b"))?;
            let da = (&a * &b).dlog_mod_pi().map_err(err)?;
            let sum = field.add(&a.dlog_mod_pi().map_err(err)?, &b.dlog_mod_pi().map_err(err)?);
            ensure(da == sum, || format!("p={p}: dlog(ab) != dlog a + dlog b"))?;
        }
    }
    Ok("p = 3, 5, 7".into())
}

fn pth_power_law(_: ExecMode) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut count = 0;
    let mut check = |ctx: &Arc<PrimeContext>, r: &crate::field::ResidueElement| -> Result<(), String> {
        let p = ctx.p();
        let field = ctx.residue_field();
        let x = &CycloElement::one(ctx) + &(&CycloElement::teichmuller(ctx, r) * &CycloElement::pi(ctx));
        let rr = field.sub(&field.pow(r, p), r);
        let want = &CycloElement::one(ctx)
            + &(&CycloElement::teichmuller(ctx, &rr) * &CycloElement::pi_pow(ctx, p as usize));
        count += 1;
        ensure(x.pow(p).congruent(&want, p as usize + 1), || format!("p={p} r={}", field.display(r)))
    };
    for n in 1..=3 {
        let ctx = ctx(3, n)?;
        let field = ctx.residue_field();
        for i in 0..field.order().expect("small") {
            check(&ctx, &field.element_from_index(i))?;
        }
    }
    for p in [5u64, 7] {
        let ctx = ctx(p, 2)?;
        let field = ctx.residue_field();
        for _ in 0..100 {
            check(&ctx, &field.element_from_index(rng.random_range(0..field.order().expect("small"))))?;
        }
    }
    Ok(format!("{count} values"))
}

fn eisenstein_pair(p: u64, d: i64, bound: usize, mode: ExecMode) -> Result<(ModFormModP, ModFormModP), String> {
    let field = Arc::new(FiniteField::new(p, 1).map_err(|e| e.to_string())?);
    let one = DirichletCharacter::trivial(field.clone(), 1).map_err(|e| e.to_string())?;
    let chi = DirichletCharacter::quadratic(field, d).map_err(|e| e.to_string())?;
    let f = eisenstein_with(p as u32, &one, &chi, bound, mode).map_err(|e| e.to_string())?;
    let g = eisenstein_with(1, &one, &chi, bound, mode).map_err(|e| e.to_string())?;
    Ok((f, g))
}

fn theta_hecke(mode: ExecMode) -> Result<String, String> {
    let mut eigen = 0;
    for (p, d) in [(5u64, -4i64), (7, -3)] {
        let (f, _) = eisenstein_pair(p, d, 500, mode)?;
        let lhs = theta_pow(&f, p as u32);
        ensure(lhs.qexp().first_difference(theta(&f).qexp(), 500).is_none(), || format!("p={p}: theta^p != theta"))?;

        let (big, _) = eisenstein_pair(p, d, 50 * 50, mode)?;
        let field = big.field();
        for l in (2..=50u64).filter(|&l| crate::fp_poly::is_prime(l) && l != p && big.level() % l != 0) {
            let tf = hecke(&big, HeckeOperator::T(l)).map_err(|e| e.to_string())?;
            let lam = field.add(
                &field.one(),
                &field.scale(&big.character().eval(l), crate::fp_poly::pow_mod(l % p, p - 1, p)),
            );
            let b = tf.bound();
            let ok = (0..=b).all(|n| *tf.qexp().coeff(n) == field.mul(&lam, big.qexp().coeff(n)));
            ensure(ok, || format!("p={p} l={l}: not an eigenvector"))?;
            eigen += 1;
        }
    }
    Ok(format!("{eigen} hecke eigenvalues"))
}

fn eisenstein_companions(mode: ExecMode) -> Result<String, String> {
    for (p, d) in [(5u64, -4i64), (7, -3)] {
        let (f, g) = eisenstein_pair(p, d, 300, mode)?;
        let a_p = f.qexp().coeff(p as usize).clone();
        ensure(exceptional_check(&f, &a_p), || format!("p={p}: not exceptional"))?;
        let ok = companion_check(&f, &g, 300).map_err(|e| e.to_string())?;
        ensure(ok, || format!("p={p}: companion relation fails"))?;
    }
    Ok("p = 5 and p = 7".into())
}

/// Shipped job documents with their expected JSON reports and exit codes.
pub const GOLDEN: [(&str, Mode, &str, &str, i32); 7] = [
    (
        "normal_form_zeta",
        Mode::NormalForm,
        include_str!("../tests/golden/normal_form_zeta.json"),
        include_str!("../tests/golden/normal_form_zeta.out"),
        0,
    ),
    (
        "qp_from_q_p3",
        Mode::QpFromQ,
        include_str!("../tests/golden/qp_from_q_p3.json"),
        include_str!("../tests/golden/qp_from_q_p3.out"),
        0,
    ),
    (
        "verdict_invariants_split",
        Mode::Verdict,
        include_str!("../tests/golden/verdict_invariants_split.json"),
        include_str!("../tests/golden/verdict_invariants_split.out"),
        0,
    ),
    (
        "verdict_q_extension",
        Mode::Verdict,
        include_str!("../tests/golden/verdict_q_extension.json"),
        include_str!("../tests/golden/verdict_q_extension.out"),
        3,
    ),
    (
        "companion_p5",
        Mode::Companion,
        include_str!("../tests/golden/companion_p5.json"),
        include_str!("../tests/golden/companion_p5.out"),
        0,
    ),
    (
        "inadmissible_normal_form",
        Mode::NormalForm,
        include_str!("../tests/golden/inadmissible_normal_form.json"),
        include_str!("../tests/golden/inadmissible_normal_form.out"),
        2,
    ),
    ("malformed", Mode::NormalForm, include_str!("../tests/golden/malformed.json"), include_str!("../tests/golden/malformed.out"), 1),
];

fn golden_jobs(_: ExecMode) -> Result<String, String> {
    for (name, mode, job, expected, code) in GOLDEN {
        let out = run_document(job.as_bytes(), Some(mode), Path::new("."), Overrides::default());
        ensure(out.exit_code == code, || format!("{name}: exit {} instead of {code}", out.exit_code))?;
        ensure(emit_report(&out.report, Format::Json) == expected, || format!("{name}: report differs"))?;
    }
    Ok(format!("{} documents", GOLDEN.len()))
}
