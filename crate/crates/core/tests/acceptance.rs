//! Acceptance suite: nine exact criteria, one line each. Runs without the
//! libtest harness so the lines are always printed.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use splitcrit::descent::{
    cocycle_identity_defect, qp_from_q_with, solve_frobenius_equation, splitting_verdict, verify_cocycle,
    DescentGenerators, DescentProblem, VerdictSource,
};
use splitcrit::modforms::{companion_check, eisenstein, exceptional_check, hecke, theta, theta_pow, HeckeOperator};
use splitcrit::units::brute_force_eigenclasses;
use splitcrit::{default_context, CycloElement, PrimeContext};

type Criterion = fn() -> String;

const CRITERIA: [(&str, Criterion); 9] = [
    ("eigenclass enumeration", eigenclass_enumeration),
    ("frobenius generator congruences", generator_congruences),
    ("q/w^p against the closed form", closed_form_equivalence),
    ("cocycle identity", cocycle_identity),
    ("splitting lemma", splitting_lemma),
    ("log and dlog", log_dlog),
    ("p-th power law", pth_power_law),
    ("modular form operators", modular_forms),
    ("cli golden reports", cli_golden),
];

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|_| {}));
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in CRITERIA.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} [{detail}] ({secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {}: FAIL {name}: {msg} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1}s", CRITERIA.len() - failed, CRITERIA.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ctx(p: u64, n: usize) -> Arc<PrimeContext> {
    default_context(p, n).unwrap()
}

/// Eigen test by definition, on classes: `σ_u(q)/q^u` and `φ(q)/q^c` are
/// p-th powers mod π^{p+1}. Returns the eigen cosets.
fn eigen_cosets(ctx: &Arc<PrimeContext>, c: u64) -> BTreeSet<BTreeSet<Vec<Vec<u64>>>> {
    let p = ctx.p();
    let m = p as usize + 1;
    let power_elems = pth_power_elements(ctx);
    let powers = pth_powers(ctx);
    all_one_units(ctx)
        .into_iter()
        .filter(|q| {
            let inv = q.inverse().unwrap();
            let mut inv_pow = CycloElement::one(ctx);
            let mut ok = true;
            for u in 1..p {
                inv_pow = &inv_pow * &inv;
                let ratio = (&q.sigma(u).unwrap() * &inv_pow).truncate(m);
                ok &= powers.contains(&key(&ratio, p as usize));
            }
            let mut q_c = CycloElement::one(ctx);
            for _ in 0..c % p {
                q_c = &q_c * q;
            }
            let ratio = (&q.frobenius() * &q_c.inverse().unwrap()).truncate(m);
            ok && powers.contains(&key(&ratio, p as usize))
        })
        .map(|q| coset(&q, &power_elems))
        .collect()
}

fn eigenclass_enumeration() -> String {
    let mut sizes = Vec::new();
    for (p, n) in [(3u64, 1usize), (3, 2), (5, 1)] {
        let small = small_context(p, n);
        let power_elems = pth_power_elements(&small);
        let oracle = eigen_cosets(&small, 1);
        let normal_forms: BTreeSet<_> = (0..p)
            .flat_map(|s| (0..p).map(move |t| (s, t)))
            .map(|(s, t)| key(&normal_form_element(&small, s, t), p as usize))
            .collect();
        let classes = brute_force_eigenclasses(&ctx(p, n), 1).unwrap();
        let got: BTreeSet<_> =
            classes.iter().map(|c| c.digits().iter().map(|d| d.coeffs().to_vec()).collect::<Vec<_>>()).collect();
        let got_cosets: BTreeSet<_> = classes
            .iter()
            .map(|c| coset(&c.to_element().embed_into(&small).unwrap(), &power_elems))
            .collect();
        assert_eq!(got.len(), (p * p) as usize, "p={p} n={n}");
        assert_eq!(got_cosets.len(), got.len(), "p={p} n={n}: two representatives of one class");
        assert_eq!(got_cosets, oracle, "p={p} n={n}: enumeration differs from the search");
        assert_eq!(got, normal_forms, "p={p} n={n}: not the normal forms");
        sizes.push(got.len().to_string());
    }
    format!("{} classes", sizes.join("/"))
}

fn generator_congruences() -> String {
    for p in [3u64, 5, 7] {
        let ctx = ctx(p, p as usize);
        let m = p as usize + 1;
        let one = CycloElement::one(&ctx);
        let zeta = CycloElement::zeta(&ctx);
        let u = solve_frobenius_equation(&zeta).unwrap();
        let v = solve_frobenius_equation(&one_plus_pi_p(&ctx)).unwrap();
        assert!(u.frobenius().congruent(&(&zeta * &u), m), "p={p}: phi(u) != zeta u");
        assert!(v.frobenius().congruent(&(&one_plus_pi_p(&ctx) * &v), m), "p={p}: phi(v) != (1+pi^p) v");
        let up = (0..p - 1).fold(u.clone(), |acc, _| &acc * &u);
        let vp = (0..p - 1).fold(v.clone(), |acc, _| &acc * &v);
        assert!((&up * &one_plus_pi_p(&ctx)).congruent(&one, m), "p={p}: u^p (1+pi^p) != 1");
        assert!(vp.congruent(&one, m), "p={p}: v^p != 1");
    }
    "p = 3, 5, 7 at n_work = p".into()
}

fn closed_form_equivalence() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut count = 0;
    for p in [3u64, 5, 7] {
        let ctx = ctx(p, p as usize);
        let gens = DescentGenerators::new(&ctx);
        let m = p as usize + 1;
        let cs: Vec<u64> = (0..10).map(|_| 1 + p * rng.random_range(1..p * p * p)).collect();
        for s in 0..p {
            for t in 0..p {
                let q = normal_form_element(&ctx, s, t);
                for &c in &cs {
                    let e = (c - 1) / p;
                    let q_e = square_and_multiply(&q, e);
                    let w = solve_frobenius_equation(&q_e).unwrap();
                    assert!(w.frobenius().congruent(&(&q_e * &w), m), "p={p} c={c}: phi(w) != q^e w");
                    let wp = (0..p - 1).fold(w.clone(), |acc, _| &acc * &w);
                    let direct = (&q * &wp.inverse().unwrap()).truncate(m);
                    let closed = normal_form_element(&ctx, s, (t + s * (e % p)) % p).truncate(m);
                    assert!(direct.congruent(&closed, m), "p={p} (s,t)=({s},{t}) c={c}: q/w^p != closed form");
                    assert!(direct.frobenius().congruent(&direct, m), "p={p}: q/w^p not phi-fixed");
                    for i in 0..m {
                        assert!(ctx.residue_field().prime_field_value(&direct.digit(i)).is_some(), "digit {i} not in F_p");
                    }
                    let r = qp_from_q_with(&DescentProblem::new(q.clone(), c, 1).unwrap(), &gens).unwrap();
                    assert_eq!((r.nf_qp.s(), r.nf_qp.t()), (s, (t + s * (e % p)) % p), "p={p}: library route");
                    count += 1;
                }
            }
        }
    }
    format!("{count} cases")
}

fn square_and_multiply(x: &CycloElement, mut e: u64) -> CycloElement {
    let mut base = x.clone();
    let mut acc = CycloElement::one(x.context());
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

fn cocycle_identity() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for i in 0..50 {
        let p = [3u64, 5, 7][i % 3];
        let ctx = ctx(p, 1 + i % 2);
        let (s, t) = (rng.random_range(0..p), rng.random_range(0..p));
        let a = rng.random_range(0..p) as i64;
        let tail = &CycloElement::one(&ctx) + &(&CycloElement::from_int(&ctx, a) * &CycloElement::pi_pow(&ctx, p as usize + 1));
        let q = &normal_form_element(&ctx, s, t) * &tail;
        let c = 1 + p * rng.random_range(0..p * p);
        assert!(verify_cocycle(&q, c, 4).unwrap(), "p={p} (s,t)=({s},{t}) c={c}");
    }
    for p in [3u64, 5, 7] {
        let ctx = ctx(p, 1);
        let one = CycloElement::one(&ctx);
        let one_plus_pi2 = &one + &CycloElement::pi_pow(&ctx, 2);
        for bad in [&one + &CycloElement::pi(&ctx), one_plus_pi2.clone(), &CycloElement::zeta(&ctx) * &one_plus_pi2] {
            assert!(verify_cocycle(&bad, 1 + p, 4).is_err(), "p={p}: non-eigen input accepted");
            assert!(cocycle_identity_defect(&bad, 1 + p, 4).unwrap().is_some(), "p={p}: identity holds off the eigenspace");
        }
    }
    "50 admissible pairs, 9 non-eigen inputs rejected".into()
}

fn splitting_lemma() -> String {
    let p = 3u64;
    let small = small_context(p, 2);
    let powers = pth_powers(&small);
    let ctx = ctx(p, p as usize);
    let mut split = 0;
    for s in 0..p {
        for t in 0..p {
            let q = normal_form_element(&ctx, s, t);
            let v = splitting_verdict(&VerdictSource::SerreTate { q, c_gamma: 1, n: 1 }).unwrap();
            let searched = powers.contains(&key(&normal_form_element(&small, s, t), p as usize));
            assert_eq!(v.split, searched, "(s,t)=({s},{t}): verdict disagrees with the search");
            assert_eq!(v.split, s == 0 && t == 0, "(s,t)=({s},{t})");
            split += v.split as usize;
        }
    }
    format!("{split} split, {} not split", p * p - split as u64)
}

fn random_one_unit(rng: &mut ChaCha8Rng, ctx: &Arc<PrimeContext>) -> CycloElement {
    let field = ctx.residue_field();
    let order = field.order().unwrap();
    let mut digits = vec![field.one()];
    digits.extend((1..ctx.precision()).map(|_| field.element_from_index(rng.random_range(0..order))));
    CycloElement::from_digits(ctx, &digits)
}

fn log_dlog() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let mut pairs = 0;
    for p in [3u64, 5, 7] {
        let ctx = ctx(p, 2);
        let field = ctx.residue_field();
        for s in 0..p {
            let z = normal_form_element(&ctx, s, 0);
            assert_eq!(z.dlog_mod_pi().unwrap(), field.from_i64(-(s as i64)), "p={p} s={s}");
        }
        for t in 0..p {
            let l = normal_form_element(&ctx, 0, t).log_one_unit().unwrap();
            assert_eq!(field.prime_field_value(&l.digit(p as usize)), Some(t), "p={p} t={t}");
        }
    }
    for i in 0..200 {
        let p = [3u64, 5, 7][i % 3];
        let ctx = ctx(p, 2);
        let field = ctx.residue_field();
        let a = random_one_unit(&mut rng, &ctx);
        let b = random_one_unit(&mut rng, &ctx);
        let ab = &a * &b;
        let lhs = ab.log_one_unit().unwrap();
        let rhs = &a.log_one_unit().unwrap() + &b.log_one_unit().unwrap();
        assert!(lhs.congruent(&rhs, lhs.precision().min(rhs.precision())), "p={p}: log(ab)");
        let sum = field.add(&a.dlog_mod_pi().unwrap(), &b.dlog_mod_pi().unwrap());
        assert_eq!(ab.dlog_mod_pi().unwrap(), sum, "p={p}: dlog(ab)");
        pairs += 1;
    }
    format!("{pairs} random pairs")
}

fn pth_power_law() -> String {
    let mut count = 0;
    let mut check = |ctx: &Arc<PrimeContext>, idx: u128| {
        let p = ctx.p();
        let field = ctx.residue_field();
        let r = field.element_from_index(idx);
        let x = &CycloElement::one(ctx) + &(&CycloElement::teichmuller(ctx, &r) * &CycloElement::pi(ctx));
        let xp = (1..p).fold(x.clone(), |acc, _| &acc * &x);
        let mut rp = field.one();
        for _ in 0..p {
            rp = field.mul(&rp, &r);
        }
        let want = &CycloElement::one(ctx)
            + &(&CycloElement::teichmuller(ctx, &field.sub(&rp, &r)) * &CycloElement::pi_pow(ctx, p as usize));
        assert!(xp.congruent(&want, p as usize + 1), "p={p} r={}", field.display(&r));
        assert!(x.pow(p).congruent(&xp, ctx.precision()), "p={p}: pow disagrees with repeated multiplication");
        count += 1;
    };
    for n in 1..=3 {
        let ctx = ctx(3, n);
        for idx in 0..ctx.residue_field().order().unwrap() {
            check(&ctx, idx);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for p in [5u64, 7] {
        let ctx = ctx(p, 3);
        let order = ctx.residue_field().order().unwrap();
        for _ in 0..100 {
            check(&ctx, rng.random_range(0..order));
        }
    }
    format!("{count} values")
}

fn modular_forms() -> String {
    let mut eigen = 0;
    for (p, d, a0_weight_one) in [(5u64, -4i64, 4u64), (7, -3, 6)] {
        let k = p as u32;
        // θ^p = θ, checked against n a_n directly
        let raw = divisor_sum(p, k, d, 0, 500);
        let f = form_from(p, k, d, &raw);
        let lib = eisenstein(k, &splitcrit_trivial(p), &splitcrit_quadratic(p, d), 500).unwrap();
        assert_eq!(lib.qexp(), f.qexp(), "p={p}: Eisenstein series differs from the divisor sum");
        let th = theta(&f);
        for (n, a) in raw.iter().enumerate() {
            assert_eq!(th.qexp().coeff(n), &th.field().from_u64(n as u64 * a % p), "p={p}: theta at q^{n}");
        }
        assert!(theta_pow(&f, k).qexp().first_difference(th.qexp(), 500).is_none(), "p={p}: theta^p != theta");

        // T_l eigenvalue 1 + ε(l) l^{k-1}
        let big_raw = divisor_sum(p, k, d, 0, 2500);
        let big = form_from(p, k, d, &big_raw);
        for l in (2..=50u64).filter(|&l| (2..l).all(|m| l % m != 0) && l != p && !modulus_of(d).is_multiple_of(l)) {
            let mut lk = 1i64;
            for _ in 0..k - 1 {
                lk = lk * l as i64 % p as i64;
            }
            let lam = (1 + chi(d, l) * lk).rem_euclid(p as i64) as u64;
            let tl = hecke(&big, HeckeOperator::T(l)).unwrap();
            for n in 0..=tl.bound() {
                assert_eq!(tl.qexp().coeff(n), &big.field().from_u64(lam * big_raw[n] % p), "p={p} T_{l} at q^{n}");
            }
            eigen += 1;
        }

        // the Remark pair: weight p and its weight-one companion
        let f = form_from(p, k, d, &divisor_sum(p, k, d, 0, 300));
        let g = form_from(p, 1, d, &divisor_sum(p, 1, d, a0_weight_one, 300));
        let a_p = f.qexp().coeff(p as usize).clone();
        assert!(exceptional_check(&f, &a_p), "p={p}: not exceptional");
        assert!(companion_check(&f, &g, 300).unwrap(), "p={p}: companion relation fails");
    }
    format!("theta^p = theta to 500, {eigen} Hecke eigenvalues, 2 companion pairs to 300")
}

fn splitcrit_trivial(p: u64) -> splitcrit::modforms::DirichletCharacter {
    let field = Arc::new(splitcrit::FiniteField::new(p, 1).unwrap());
    splitcrit::modforms::DirichletCharacter::trivial(field, 1).unwrap()
}

fn splitcrit_quadratic(p: u64, d: i64) -> splitcrit::modforms::DirichletCharacter {
    let field = Arc::new(splitcrit::FiniteField::new(p, 1).unwrap());
    splitcrit::modforms::DirichletCharacter::quadratic(field, d).unwrap()
}

fn cli_golden() -> String {
    let dir = golden_dir();
    let mut modes = BTreeSet::new();
    let mut codes = BTreeSet::new();
    for (stem, mode, code) in GOLDEN {
        let job = dir.join(format!("{stem}.json"));
        let expected = std::fs::read(dir.join(format!("{stem}.out"))).unwrap();
        let run = || Command::new(env!("CARGO_BIN_EXE_splitcrit")).args([mode, "--job"]).arg(&job).output().unwrap();
        let first = run();
        assert_eq!(first.status.code(), Some(code), "{stem}: exit code");
        assert!(first.stdout == expected, "{stem}: report differs from {stem}.out");
        if stem != "selftest" {
            assert_eq!(run().stdout, first.stdout, "{stem}: not byte-stable");
        }
        modes.insert(mode);
        codes.insert(code);
    }
    let text = Command::new(env!("CARGO_BIN_EXE_splitcrit"))
        .args(["verdict", "--format", "text", "--job"])
        .arg(dir.join("verdict_invariants_split.json"))
        .output()
        .unwrap();
    assert_eq!(text.stdout, std::fs::read(dir.join("verdict_invariants_split.txt")).unwrap(), "text report");
    assert_eq!(modes.len(), 6, "modes covered");
    assert_eq!(codes, BTreeSet::from([0, 1, 2, 3]), "exit codes covered");
    format!("{} documents, {} modes, exit codes {:?}", GOLDEN.len(), modes.len(), codes)
}
