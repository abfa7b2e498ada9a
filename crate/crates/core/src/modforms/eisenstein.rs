use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{DirichletCharacter, ModFormError, ModFormModP, QExpansion};
use crate::exec::{map_range, ExecMode};
use crate::field::{FiniteField, ResidueElement};

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Bernoulli numbers with `B_1 = -1/2`.
pub fn bernoulli_number(m: usize) -> BigRational {
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    for n in 1..=m {
        let s = (0..n).fold(BigRational::zero(), |acc, j| {
            acc + BigRational::from_integer(binomial(n + 1, j)) * &b[j]
        });
        b.push(-s / BigRational::from_integer(BigInt::from(n + 1)));
    }
    b.swap_remove(m)
}

/// `B_{k,χ} = N^{k-1} Σ_{a=1}^{N} χ(a) B_k(a/N)` for a character with values
/// in {0, ±1}.
pub fn generalized_bernoulli(k: usize, chi: &DirichletCharacter) -> Result<BigRational, ModFormError> {
    let n = chi.modulus();
    let bs: Vec<BigRational> = (0..=k).map(bernoulli_number).collect();
    let nn = BigRational::from_integer(BigInt::from(n));
    let mut total = BigRational::zero();
    for a in 1..=n {
        let c = chi.lifted(a)?;
        if c == 0 {
            continue;
        }
        let x = BigRational::new(BigInt::from(a), BigInt::from(n));
        // Bernoulli polynomial B_k(x) = Σ_j C(k, j) B_j x^{k-j}
        let bk = (0..=k).fold(BigRational::zero(), |acc, j| {
            acc + BigRational::from_integer(binomial(k, j)) * &bs[j] * num_traits::pow(x.clone(), k - j)
        });
        total += bk * BigRational::from_integer(BigInt::from(c));
    }
    Ok(total * num_traits::pow(nn, k - 1))
}

fn reduce_rational(field: &FiniteField, r: &BigRational) -> Result<ResidueElement, ModFormError> {
    let p = BigInt::from(field.p());
    let den = r.denom().mod_floor(&p);
    if den.is_zero() {
        return Err(ModFormError::NonIntegral { p: field.p() });
    }
    let num = r.numer().mod_floor(&p).to_u64().expect("reduced mod p");
    let den = den.to_u64().expect("reduced mod p");
    let inv = crate::fp_poly::inv_mod_prime(den, field.p()).expect("nonzero mod p");
    Ok(field.from_u64(num * inv % field.p()))
}

/// `-B_{k,χ} / (2k)` reduced into the coefficient field.
fn constant_term(k: u32, chi: &DirichletCharacter) -> Result<ResidueElement, ModFormError> {
    let b = generalized_bernoulli(k as usize, chi)?;
    let c = -b / BigRational::from_integer(BigInt::from(2 * k));
    debug_assert!(!c.denom().is_negative());
    reduce_rational(chi.field(), &c)
}

/// `E_k(ε1, ε2)` through `q^B`:
/// `a_n = Σ_{d|n} ε1(n/d) ε2(d) d^{k-1}`, with constant term
/// `-B_{k,ε2}/(2k)` when `ε1` is trivial (plus `-B_{1,ε1}/2` when `k = 1`
/// and `ε2` is trivial), else 0. Level `N1 N2`, character `ε1 ε2`.
pub fn eisenstein(
    k: u32,
    eps1: &DirichletCharacter,
    eps2: &DirichletCharacter,
    bound: usize,
) -> Result<ModFormModP, ModFormError> {
    eisenstein_with(k, eps1, eps2, bound, ExecMode::default())
}

pub fn eisenstein_with(
    k: u32,
    eps1: &DirichletCharacter,
    eps2: &DirichletCharacter,
    bound: usize,
    mode: ExecMode,
) -> Result<ModFormModP, ModFormError> {
    if k == 0 {
        return Err(ModFormError::ZeroWeight);
    }
    let field = eps1.field().clone();
    if *eps2.field() != field {
        return Err(ModFormError::FieldMismatch);
    }
    let parity = field.mul(&eps1.eval_minus_one(), &eps2.eval_minus_one());
    let expected = if k.is_multiple_of(2) { field.one() } else { field.from_i64(-1) };
    if parity != expected {
        return Err(ModFormError::Parity { k });
    }

    let mut a0 = field.zero();
    if eps1.is_trivial() {
        a0 = constant_term(k, eps2)?;
    }
    if k == 1 && eps2.is_trivial() {
        a0 = field.add(&a0, &constant_term(1, eps1)?);
    }

    let p = field.p();
    let coeffs = map_range(mode, bound as u64 + 1, |n| {
        if n == 0 {
            return a0.clone();
        }
        let mut acc = field.zero();
        let mut d = 1u64;
        while d * d <= n {
            if n % d == 0 {
                for (dd, e) in [(d, n / d), (n / d, d)] {
                    let term = field.mul(&eps1.eval(e), &eps2.eval(dd));
                    let power = crate::fp_poly::pow_mod(dd % p, (k - 1) as u64, p);
                    acc = field.add(&acc, &field.scale(&term, power));
                    if d * d == n {
                        break;
                    }
                }
            }
            d += 1;
        }
        acc
    });
    let level = eps1.modulus() * eps2.modulus();
    let character = eps1.product(eps2)?;
    ModFormModP::new(QExpansion::new(field, coeffs), k, level, character)
}
