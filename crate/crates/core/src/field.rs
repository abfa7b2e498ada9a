//! Finite fields F_{p^n} = F_p[y]/(h), with `h` the least irreducible
//! polynomial of degree `n` under the published ordering (see
//! [`FiniteField::new`]).
//!
//! The same kernel backs the residue fields of the local rings in
//! [`crate::padic`] and the coefficient fields of mod-p q-expansions.

use std::fmt;

use thiserror::Error;

use crate::fp_poly::{self, mul_mod, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("field degree must be at least 1")]
    ZeroDegree,
    #[error("no irreducible polynomial of degree {degree} over F_{p} found")]
    NoIrreducible { p: u64, degree: usize },
    #[error("F_{{{p}^{sub}}} is not a subfield of F_{{{p}^{big}}}")]
    NotSubfield { p: u64, sub: usize, big: usize },
}

/// Element of F_{p^n}: coefficients on the power basis `1, y, ..., y^(n-1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueElement(pub(crate) Vec<u64>);

impl ResidueElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Debug for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}y"),
                _ => format!("{c}y^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    degree: usize,
    modulus: Poly,
    /// Column `j` holds `(y^j)^p`; p-th powering is F_p-linear.
    frob: Vec<Vec<u64>>,
}

impl FiniteField {
    /// F_{p^n} defined by the least monic irreducible `h` of degree `n`,
    /// candidates compared coefficientwise from `y^(n-1)` down to `y^0`.
    pub fn new(p: u64, degree: usize) -> Result<Self, FieldError> {
        if p < 3 || !fp_poly::is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        if degree == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let modulus =
            fp_poly::least_irreducible(p, degree).ok_or(FieldError::NoIrreducible { p, degree })?;
        if !fp_poly::is_irreducible(&modulus, p) {
            return Err(FieldError::NoIrreducible { p, degree });
        }
        let mut field = FiniteField { p, degree, modulus, frob: Vec::new() };
        field.frob = (0..degree)
            .map(|j| {
                let mut basis = vec![0u64; j + 1];
                basis[j] = 1;
                let img = fp_poly::powmod(&basis, p, &field.modulus, p);
                field.pad(img).0
            })
            .collect();
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Monic defining polynomial, little-endian.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Field size, if it fits in 128 bits.
    pub fn order(&self) -> Option<u128> {
        (self.p as u128).checked_pow(self.degree as u32)
    }

    fn pad(&self, mut v: Poly) -> ResidueElement {
        v.resize(self.degree, 0);
        ResidueElement(v)
    }

    pub fn zero(&self) -> ResidueElement {
        ResidueElement(vec![0; self.degree])
    }

    pub fn one(&self) -> ResidueElement {
        self.from_u64(1)
    }

    pub fn from_u64(&self, c: u64) -> ResidueElement {
        let mut v = vec![0; self.degree];
        v[0] = c % self.p;
        ResidueElement(v)
    }

    pub fn from_i64(&self, c: i64) -> ResidueElement {
        self.from_u64(c.rem_euclid(self.p as i64) as u64)
    }

    /// Reduces an arbitrary coefficient list modulo `p` and `h`.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> ResidueElement {
        let v: Poly = coeffs.iter().map(|c| c % self.p).collect();
        self.pad(fp_poly::rem(&v, &self.modulus, self.p))
    }

    /// The class of `y`.
    pub fn generator(&self) -> ResidueElement {
        self.from_coeffs(&[0, 1])
    }

    pub fn add(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        ResidueElement(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % self.p).collect())
    }

    pub fn sub(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        ResidueElement(a.0.iter().zip(&b.0).map(|(x, y)| (x + self.p - y) % self.p).collect())
    }

    pub fn neg(&self, a: &ResidueElement) -> ResidueElement {
        ResidueElement(a.0.iter().map(|x| (self.p - x) % self.p).collect())
    }

    pub fn scale(&self, a: &ResidueElement, c: u64) -> ResidueElement {
        ResidueElement(a.0.iter().map(|&x| mul_mod(x, c % self.p, self.p)).collect())
    }

    pub fn mul(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        if self.degree == 1 {
            return ResidueElement(vec![mul_mod(a.0[0], b.0[0], self.p)]);
        }
        let prod = fp_poly::mul(&a.0, &b.0, self.p);
        self.pad(fp_poly::rem(&prod, &self.modulus, self.p))
    }

    pub fn pow(&self, a: &ResidueElement, mut exp: u64) -> ResidueElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via extended Euclid in F_p[y].
    pub fn inv(&self, a: &ResidueElement) -> Option<ResidueElement> {
        if a.is_zero() {
            return None;
        }
        let p = self.p;
        let (mut r0, mut r1) = (self.modulus.clone(), fp_poly::trim(a.0.clone()));
        let (mut t0, mut t1): (Poly, Poly) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1, p);
            let t2 = fp_poly::sub(&t0, &fp_poly::mul(&q, &t1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, t2);
        }
        // r0 is a nonzero constant
        let c = fp_poly::inv_mod_prime(r0[0], p)?;
        let t: Poly = t0.iter().map(|&x| mul_mod(x, c, p)).collect();
        Some(self.pad(fp_poly::rem(&t, &self.modulus, p)))
    }

    /// `a^p`.
    pub fn frobenius(&self, a: &ResidueElement) -> ResidueElement {
        let mut out = vec![0u64; self.degree];
        for (j, &c) in a.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &f) in out.iter_mut().zip(&self.frob[j]) {
                *o = (*o + mul_mod(c, f, self.p)) % self.p;
            }
        }
        ResidueElement(out)
    }

    /// `a^(p^k)`.
    pub fn frobenius_iter(&self, a: &ResidueElement, k: usize) -> ResidueElement {
        (0..k % self.degree).fold(a.clone(), |acc, _| self.frobenius(&acc))
    }

    /// Absolute trace to F_p.
    pub fn trace(&self, a: &ResidueElement) -> u64 {
        let mut acc = self.zero();
        let mut cur = a.clone();
        for _ in 0..self.degree {
            acc = self.add(&acc, &cur);
            cur = self.frobenius(&cur);
        }
        acc.0[0]
    }

    /// `Some(c)` when `a` is the prime-field element `c`.
    pub fn prime_field_value(&self, a: &ResidueElement) -> Option<u64> {
        if a.0[1..].iter().all(|&c| c == 0) {
            Some(a.0[0])
        } else {
            None
        }
    }

    /// Membership in the subfield of degree `d` (fixed by `x -> x^(p^d)`).
    pub fn in_subfield(&self, a: &ResidueElement, d: usize) -> bool {
        self.degree.is_multiple_of(d) && self.frobenius_iter(a, d) == *a
    }

    /// Bijection `0..p^n -> F_{p^n}`, base-p digits as coefficients.
    pub fn element_from_index(&self, mut index: u128) -> ResidueElement {
        let mut v = vec![0u64; self.degree];
        for c in v.iter_mut() {
            *c = (index % self.p as u128) as u64;
            index /= self.p as u128;
        }
        ResidueElement(v)
    }

    pub fn index_of(&self, a: &ResidueElement) -> u128 {
        a.0.iter().rev().fold(0u128, |acc, &c| acc * self.p as u128 + c as u128)
    }

    /// Matrix (row-major) of the F_p-linear map `x -> x^p - x`.
    fn artin_schreier_matrix(&self) -> Vec<Vec<u64>> {
        let n = self.degree;
        let mut rows = vec![vec![0u64; n]; n];
        for j in 0..n {
            for (i, row) in rows.iter_mut().enumerate() {
                let diag = u64::from(i == j);
                row[j] = (self.frob[j][i] + self.p - diag) % self.p;
            }
        }
        rows
    }

    /// A root of `x^p - x = a`, or `None` when `Tr(a) != 0`. Free
    /// coordinates of the solution are set to zero, so `a = 0` gives `0`.
    pub fn artin_schreier(&self, a: &ResidueElement) -> Option<ResidueElement> {
        if self.trace(a) != 0 {
            return None;
        }
        let x = solve_linear(&self.artin_schreier_matrix(), &a.0, self.p)?;
        Some(ResidueElement(x))
    }

    pub fn display(&self, a: &ResidueElement) -> String {
        a.to_string()
    }
}

fn poly_divrem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
    let db = fp_poly::degree(b).expect("nonzero divisor");
    let inv = fp_poly::inv_mod_prime(b[db], p).unwrap();
    let mut r = fp_poly::trim(a.to_vec());
    let mut q = vec![0u64; r.len().saturating_sub(db).max(1)];
    while let Some(dr) = fp_poly::degree(&r) {
        if dr < db {
            break;
        }
        let c = mul_mod(r[dr], inv, p);
        q[dr - db] = c;
        for (j, &bj) in b.iter().enumerate().take(db + 1) {
            r[dr - db + j] = (r[dr - db + j] + p - mul_mod(c, bj, p)) % p;
        }
        r = fp_poly::trim(r);
    }
    (fp_poly::trim(q), r)
}

/// Solves `A x = b` over F_p (row-major `A`), free variables set to zero.
pub(crate) fn solve_linear(a: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut row = r.clone();
            row.push(bi % p);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = fp_poly::inv_mod_prime(m[r][c], p).unwrap();
        for x in m[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..=cols {
                    m[i][j] = (m[i][j] + p - mul_mod(f, m[r][j], p)) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| row[cols] != 0) {
        return None;
    }
    let mut x = vec![0u64; cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols];
    }
    Some(x)
}

/// Polynomials over a finite field, used for root finding.
type FqPoly = Vec<ResidueElement>;

struct FqPolyRing<'a> {
    f: &'a FiniteField,
}

impl FqPolyRing<'_> {
    fn trim(&self, mut a: FqPoly) -> FqPoly {
        while a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
        a
    }

    fn mul(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.f.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.f.add(&out[i + j], &self.f.mul(x, y));
            }
        }
        self.trim(out)
    }

    fn divrem(&self, a: &FqPoly, m: &FqPoly) -> (FqPoly, FqPoly) {
        let dm = m.len() - 1;
        let inv = self.f.inv(&m[dm]).expect("nonzero leading coefficient");
        let mut r = self.trim(a.clone());
        let mut q = vec![self.f.zero(); r.len().saturating_sub(dm).max(1)];
        while r.len() > dm {
            let dr = r.len() - 1;
            let c = self.f.mul(&r[dr], &inv);
            for (j, mj) in m.iter().enumerate() {
                r[dr - dm + j] = self.f.sub(&r[dr - dm + j], &self.f.mul(&c, mj));
            }
            q[dr - dm] = c;
            r = self.trim(r);
        }
        (self.trim(q), r)
    }

    fn rem(&self, a: &FqPoly, m: &FqPoly) -> FqPoly {
        self.divrem(a, m).1
    }

    fn monic_gcd(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        let (mut x, mut y) = (self.trim(a.clone()), self.trim(b.clone()));
        while !y.is_empty() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        if let Some(lead) = x.last().cloned() {
            let inv = self.f.inv(&lead).unwrap();
            x = x.iter().map(|c| self.f.mul(c, &inv)).collect();
        }
        x
    }

    fn powmod(&self, base: &FqPoly, mut exp: u64, m: &FqPoly) -> FqPoly {
        let mut acc = self.rem(&vec![self.f.one()], m);
        let mut b = self.rem(base, m);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.rem(&self.mul(&acc, &b), m);
            }
            b = self.rem(&self.mul(&b, &b), m);
            exp >>= 1;
        }
        acc
    }

    /// A root of a monic squarefree polynomial that splits into linear
    /// factors, by Cantor-Zassenhaus splitting with deterministic shifts.
    fn split_root(&self, f: &FqPoly) -> ResidueElement {
        if f.len() == 2 {
            return self.f.neg(&f[0]);
        }
        let p = self.f.p();
        let n = self.f.degree();
        for shift in 0u128.. {
            let delta = self.f.element_from_index(shift);
            let a: FqPoly = vec![delta.clone(), self.f.one()];
            if self.eval(f, &self.f.neg(&delta)).is_zero() {
                return self.f.neg(&delta);
            }
            // a^((q-1)/2) = prod_i (a^((p-1)/2))^(p^i)
            let mut c = self.powmod(&a, (p - 1) / 2, f);
            let mut acc = self.rem(&vec![self.f.one()], f);
            for _ in 0..n {
                acc = self.rem(&self.mul(&acc, &c), f);
                c = self.powmod(&c, p, f);
            }
            let mut minus_one = acc;
            if minus_one.is_empty() {
                minus_one.push(self.f.zero());
            }
            minus_one[0] = self.f.sub(&minus_one[0], &self.f.one());
            let g = self.monic_gcd(f, &self.trim(minus_one));
            if g.len() > 1 && g.len() < f.len() {
                return self.split_root(&g);
            }
        }
        unreachable!()
    }

    fn eval(&self, f: &FqPoly, x: &ResidueElement) -> ResidueElement {
        f.iter().rev().fold(self.f.zero(), |acc, c| self.f.add(&self.f.mul(&acc, x), c))
    }
}

/// Embedding of a subfield `F_{p^d}` (with its own defining polynomial)
/// into `F_{p^n}`, `d | n`. The generator is sent to the least root of the
/// subfield's defining polynomial under the element ordering.
#[derive(Clone, Debug)]
pub struct Embedding {
    sub: FiniteField,
    big: FiniteField,
    /// `rho^j` for `j < d`.
    basis: Vec<ResidueElement>,
}

impl Embedding {
    pub fn new(sub: &FiniteField, big: &FiniteField) -> Result<Self, FieldError> {
        if sub.p != big.p || !big.degree.is_multiple_of(sub.degree) {
            return Err(FieldError::NotSubfield { p: big.p, sub: sub.degree, big: big.degree });
        }
        let ring = FqPolyRing { f: big };
        let h: FqPoly = sub.modulus.iter().map(|&c| big.from_u64(c)).collect();
        let root = ring.split_root(&h);
        let rho = (0..sub.degree)
            .map(|i| big.frobenius_iter(&root, i))
            .min()
            .expect("nonempty conjugate set");
        let mut basis = Vec::with_capacity(sub.degree);
        let mut cur = big.one();
        for _ in 0..sub.degree {
            basis.push(cur.clone());
            cur = big.mul(&cur, &rho);
        }
        Ok(Embedding { sub: sub.clone(), big: big.clone(), basis })
    }

    pub fn image_of_generator(&self) -> ResidueElement {
        if self.sub.degree == 1 {
            // h = y, so the generator is 0
            return self.big.zero();
        }
        self.basis[1].clone()
    }

    pub fn map(&self, a: &ResidueElement) -> ResidueElement {
        a.0.iter()
            .zip(&self.basis)
            .fold(self.big.zero(), |acc, (&c, b)| self.big.add(&acc, &self.big.scale(b, c)))
    }

    /// Inverse image of an element of the subfield, `None` otherwise.
    pub fn preimage(&self, a: &ResidueElement) -> Option<ResidueElement> {
        let n = self.big.degree;
        let rows: Vec<Vec<u64>> =
            (0..n).map(|i| self.basis.iter().map(|b| b.0[i]).collect()).collect();
        let x = solve_linear(&rows, &a.0, self.big.p)?;
        Some(ResidueElement(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f27_is_defined_by_y3_2y_1() {
        let f = FiniteField::new(3, 3).unwrap();
        assert_eq!(f.modulus(), &[1, 2, 0, 1]);
    }

    #[test]
    fn rejects_two_and_composites() {
        assert_eq!(FiniteField::new(2, 1), Err(FieldError::NotOddPrime(2)));
        assert_eq!(FiniteField::new(9, 1), Err(FieldError::NotOddPrime(9)));
    }

    #[test]
    fn field_axioms_sampled_f25() {
        let f = FiniteField::new(5, 2).unwrap();
        let elems: Vec<_> = (0..25).map(|i| f.element_from_index(i)).collect();
        for a in &elems {
            if !a.is_zero() {
                let inv = f.inv(a).unwrap();
                assert_eq!(f.mul(a, &inv), f.one());
            }
            for b in &elems {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.sub(&f.add(a, b), b), *a);
            }
        }
    }

    #[test]
    fn frobenius_has_order_degree() {
        let f = FiniteField::new(3, 4).unwrap();
        let a = f.from_coeffs(&[1, 2, 0, 1]);
        assert_eq!(f.frobenius(&a), f.pow(&a, 3));
        assert_eq!(f.frobenius_iter(&a, 4), a);
    }

    #[test]
    fn artin_schreier_trace_obstruction() {
        let f1 = FiniteField::new(3, 1).unwrap();
        assert_eq!(f1.artin_schreier(&f1.zero()), Some(f1.zero()));
        assert_eq!(f1.artin_schreier(&f1.from_i64(-1)), None);

        let f3 = FiniteField::new(3, 3).unwrap();
        let a = f3.from_i64(-1);
        let x = f3.artin_schreier(&a).unwrap();
        assert_eq!(f3.sub(&f3.frobenius(&x), &x), a);
    }

    #[test]
    fn embedding_of_f9_into_f81() {
        let sub = FiniteField::new(3, 2).unwrap();
        let big = FiniteField::new(3, 4).unwrap();
        let e = Embedding::new(&sub, &big).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let a = sub.element_from_index(i);
                let b = sub.element_from_index(j);
                assert_eq!(e.map(&sub.mul(&a, &b)), big.mul(&e.map(&a), &e.map(&b)));
                assert_eq!(e.map(&sub.add(&a, &b)), big.add(&e.map(&a), &e.map(&b)));
            }
            let a = sub.element_from_index(i);
            assert_eq!(e.preimage(&e.map(&a)), Some(a));
        }
        assert_eq!(e.preimage(&big.generator()), None);
    }
}
