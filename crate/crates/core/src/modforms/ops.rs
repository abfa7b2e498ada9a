use super::{ModFormError, ModFormModP, QExpansion};
use crate::field::ResidueElement;
use crate::fp_poly::{is_prime, pow_mod};

/// `θ(Σ a_n q^n) = Σ n a_n q^n`; weight goes up by `p + 1`, bound unchanged.
pub fn theta(f: &ModFormModP) -> ModFormModP {
    theta_closed_form(f, 1)
}

/// θ applied `r` times.
pub fn theta_pow(f: &ModFormModP, r: u32) -> ModFormModP {
    (0..r).fold(f.clone(), |g, _| theta(&g))
}

/// `Σ n^r a_n q^n` in one pass, with the weight of `θ^r f`.
pub fn theta_closed_form(f: &ModFormModP, r: u32) -> ModFormModP {
    let field = f.field();
    let p = field.p();
    let coeffs = f
        .qexp()
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, a)| field.scale(a, pow_mod(n as u64 % p, r as u64, p)))
        .collect();
    f.with_qexp(QExpansion::new(field.clone(), coeffs), f.weight() + r * (p as u32 + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeckeOperator {
    /// `T_l` for a prime `l ∤ Np`.
    T(u64),
    U,
}

/// `T_l`: `a_n ↦ a_{nl} + ε(l) l^{k-1} a_{n/l}`, bound `⌊B/l⌋`.
/// `U_p`: `a_n ↦ a_{np}`, bound `⌊B/p⌋`.
pub fn hecke(f: &ModFormModP, op: HeckeOperator) -> Result<ModFormModP, ModFormError> {
    let field = f.field();
    let p = f.p();
    let b = f.bound();
    let a = f.qexp().coeffs();
    let coeffs: Vec<ResidueElement> = match op {
        HeckeOperator::U => (0..=b / p as usize).map(|n| a[n * p as usize].clone()).collect(),
        HeckeOperator::T(l) => {
            if !is_prime(l) {
                return Err(ModFormError::NotPrime(l));
            }
            if l == p || f.level().is_multiple_of(l) {
                return Err(ModFormError::Ramified { l });
            }
            let lu = l as usize;
            if b < lu {
                return Err(ModFormError::BoundTooSmall { have: b, need: lu });
            }
            let c = field.scale(&f.character().eval(l), pow_mod(l % p, f.weight() as u64 - 1, p));
            (0..=b / lu)
                .map(|n| {
                    let mut v = a[n * lu].clone();
                    if n % lu == 0 {
                        v = field.add(&v, &field.mul(&c, &a[n / lu]));
                    }
                    v
                })
                .collect()
        }
    };
    Ok(f.with_qexp(QExpansion::new(field.clone(), coeffs), f.weight()))
}

/// Whether `θ g = θ^{k'} f` through `q^B`, `k' = p + 1 - k`. Weight and
/// character mismatches are errors, coefficient mismatches give `false`.
pub fn companion_check(f: &ModFormModP, g: &ModFormModP, bound: usize) -> Result<bool, ModFormError> {
    if f.field() != g.field() {
        return Err(ModFormError::FieldMismatch);
    }
    if f.level() != g.level() {
        return Err(ModFormError::LevelMismatch(f.level(), g.level()));
    }
    let k_dual = f.p() as i64 + 1 - f.weight() as i64;
    if k_dual < 1 || g.weight() as i64 != k_dual {
        return Err(ModFormError::WeightMismatch { expected: k_dual, got: g.weight() });
    }
    if f.character() != g.character() {
        return Err(ModFormError::CharacterMismatch);
    }
    let have = f.bound().min(g.bound());
    if have < bound {
        return Err(ModFormError::BoundTooSmall { have, need: bound });
    }
    let lhs = theta(g);
    let rhs = theta_pow(f, k_dual as u32);
    Ok(lhs.qexp().first_difference(rhs.qexp(), bound).is_none())
}

/// `a_p ≠ 0`, `k = p` and `ε(p) = a_p²`.
pub fn exceptional_check(f: &ModFormModP, a_p: &ResidueElement) -> bool {
    let field = f.field();
    !a_p.is_zero() && f.weight() as u64 == f.p() && f.character().eval(f.p()) == field.mul(a_p, a_p)
}

/// `(a_l, ε(l) l^{k-1})`, the trace and determinant of Frobenius at `l`.
pub fn frobenius_charpoly(f: &ModFormModP, l: u64) -> Result<(ResidueElement, ResidueElement), ModFormError> {
    if !is_prime(l) {
        return Err(ModFormError::NotPrime(l));
    }
    if l == f.p() || f.level().is_multiple_of(l) {
        return Err(ModFormError::Ramified { l });
    }
    if f.bound() < l as usize {
        return Err(ModFormError::BoundTooSmall { have: f.bound(), need: l as usize });
    }
    let p = f.p();
    let field = f.field();
    let det = field.scale(&f.character().eval(l), pow_mod(l % p, f.weight() as u64 - 1, p));
    Ok((f.qexp().coeff(l as usize).clone(), det))
}
