#![allow(dead_code)]

//! Oracles shared by the integration tests. Nothing here calls the library
//! routine it is used to check.

use std::collections::BTreeSet;
use std::sync::Arc;

use splitcrit::modforms::{DirichletCharacter, ModFormModP, QExpansion};
use splitcrit::{make_context, CycloElement, FiniteField, PrimeContext};

/// Quadratic characters of conductor 3 and 4, by table.
pub fn chi(d: i64, n: u64) -> i64 {
    match d {
        -4 => [0, 1, 0, -1][(n % 4) as usize],
        -3 => [0, 1, -1][(n % 3) as usize],
        _ => panic!("no table for {d}"),
    }
}

pub fn modulus_of(d: i64) -> u64 {
    d.unsigned_abs()
}

/// `a_n = Σ_{d|n} χ(d) d^{k-1} mod p` for `n ≥ 1`, with `a_0` given.
pub fn divisor_sum(p: u64, k: u32, d: i64, a0: u64, bound: usize) -> Vec<u64> {
    let mut out = vec![a0 % p];
    for n in 1..=bound as u64 {
        let mut s: i64 = 0;
        for e in (1..=n).filter(|e| n % e == 0) {
            let mut pw = 1i64;
            for _ in 0..k - 1 {
                pw = pw * (e % p) as i64 % p as i64;
            }
            s = (s + chi(d, e) * pw).rem_euclid(p as i64);
        }
        out.push(s as u64);
    }
    out
}

/// A weight-`k` form over F_p built from raw coefficient values.
pub fn form_from(p: u64, k: u32, d: i64, coeffs: &[u64]) -> ModFormModP {
    let field = Arc::new(FiniteField::new(p, 1).unwrap());
    let n = modulus_of(d);
    let values = (0..n).map(|a| field.from_i64(chi(d, a))).collect();
    let character = DirichletCharacter::new(field.clone(), values).unwrap();
    let qexp = QExpansion::new(field.clone(), coeffs.iter().map(|&c| field.from_u64(c)).collect());
    ModFormModP::new(qexp, k, n, character).unwrap()
}

pub fn key(x: &CycloElement, p: usize) -> Vec<Vec<u64>> {
    (1..=p).map(|i| x.digit(i).coeffs().to_vec()).collect()
}

/// Every 1-unit mod π^{p+1} over the residue field of `ctx`, as digit lists.
pub fn all_one_units(ctx: &Arc<PrimeContext>) -> Vec<CycloElement> {
    let p = ctx.p() as usize;
    let field = ctx.residue_field();
    let order = field.order().unwrap();
    (0..order.pow(p as u32))
        .map(|mut idx| {
            let mut digits = vec![field.one()];
            for _ in 0..p {
                digits.push(field.element_from_index(idx % order));
                idx /= order;
            }
            CycloElement::from_digits(ctx, &digits)
        })
        .collect()
}

/// Distinct p-th powers of 1-units mod π^{p+1}, by multiplying out.
pub fn pth_power_elements(ctx: &Arc<PrimeContext>) -> Vec<CycloElement> {
    let p = ctx.p() as usize;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for x in all_one_units(ctx) {
        let mut y = x.clone();
        for _ in 1..p {
            y = &y * &x;
        }
        let y = y.truncate(p + 1);
        if seen.insert(key(&y, p)) {
            out.push(y);
        }
    }
    out
}

pub fn pth_powers(ctx: &Arc<PrimeContext>) -> BTreeSet<Vec<Vec<u64>>> {
    let p = ctx.p() as usize;
    pth_power_elements(ctx).iter().map(|y| key(y, p)).collect()
}

/// The coset `q (R^*)^p` mod π^{p+1}, as a set of digit lists.
pub fn coset(q: &CycloElement, powers: &[CycloElement]) -> BTreeSet<Vec<Vec<u64>>> {
    let p = q.context().p() as usize;
    powers.iter().map(|y| key(&(q * y).truncate(p + 1), p)).collect()
}

pub fn small_context(p: u64, n: usize) -> Arc<PrimeContext> {
    make_context(p, n, p as usize + 1).unwrap()
}

pub fn one_plus_pi_p(ctx: &Arc<PrimeContext>) -> CycloElement {
    &CycloElement::one(ctx) + &CycloElement::pi_pow(ctx, ctx.p() as usize)
}

/// `ζ^s (1+π^p)^t` by repeated multiplication.
pub fn normal_form_element(ctx: &Arc<PrimeContext>, s: u64, t: u64) -> CycloElement {
    let mut x = CycloElement::one(ctx);
    for _ in 0..s {
        x = &x * &CycloElement::zeta(ctx);
    }
    for _ in 0..t {
        x = &x * &one_plus_pi_p(ctx);
    }
    x
}

/// Shipped CLI documents: file stem, mode argument, exit code.
pub const GOLDEN: [(&str, &str, i32); 9] = [
    ("normal_form_zeta", "normal-form", 0),
    ("qp_from_q_p3", "qp-from-q", 0),
    ("verdict_invariants_split", "verdict", 0),
    ("verdict_q_extension", "verdict", 3),
    ("companion_p5", "companion", 0),
    ("exceptional_p7", "exceptional", 0),
    ("selftest", "selftest", 0),
    ("inadmissible_normal_form", "normal-form", 2),
    ("malformed", "normal-form", 1),
];

pub fn golden_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}
