//! The unramified coefficient ring W_K = (Z/p^K)[y]/(H), where `H` is the
//! coefficientwise lift of the residue field's defining polynomial.

use crate::field::{FiniteField, ResidueElement};
use crate::fp_poly::{inv_mod, mul_mod};

/// Element of W_K: `n` coordinates in `[0, p^K)` on the basis `1, y, ..., y^(n-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WittCoefficient(pub(crate) Vec<u64>);

impl WittCoefficient {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub struct WittRing {
    p: u64,
    n: usize,
    k: u32,
    modulus: u64,
    lift: Vec<u64>,
    /// Images `Y^j` of the basis under Frobenius, `Y` the root of `H`
    /// congruent to `y^p`.
    frob_images: Vec<Vec<u64>>,
}

impl WittRing {
    pub(crate) fn new(field: &FiniteField, k: u32, modulus: u64) -> Self {
        let n = field.degree();
        let mut ring = WittRing {
            p: field.p(),
            n,
            k,
            modulus,
            lift: field.modulus().to_vec(),
            frob_images: Vec::new(),
        };
        let root = ring.frobenius_root(field);
        let mut images = Vec::with_capacity(n);
        let mut cur = ring.one();
        for _ in 0..n {
            images.push(cur.0.clone());
            cur = ring.mul(&cur, &root);
        }
        ring.frob_images = images;
        ring
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// The exponent `K` of the coefficient modulus `p^K`.
    pub fn exponent(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Coefficients of the lift `H`, monic, little-endian.
    pub fn lift(&self) -> &[u64] {
        &self.lift
    }

    pub fn zero(&self) -> WittCoefficient {
        WittCoefficient(vec![0; self.n])
    }

    pub fn one(&self) -> WittCoefficient {
        self.from_int(1)
    }

    pub fn from_int(&self, c: i64) -> WittCoefficient {
        let mut v = vec![0; self.n];
        v[0] = c.rem_euclid(self.modulus as i64) as u64;
        WittCoefficient(v)
    }

    /// Canonical lift of a residue (coordinates in `[0, p)`).
    pub fn lift_residue(&self, r: &ResidueElement) -> WittCoefficient {
        WittCoefficient(r.coeffs().to_vec())
    }

    pub fn reduce(&self, a: &WittCoefficient) -> ResidueElement {
        ResidueElement(a.0.iter().map(|c| c % self.p).collect())
    }

    pub fn is_zero(&self, a: &WittCoefficient) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &WittCoefficient, b: &WittCoefficient) -> WittCoefficient {
        WittCoefficient(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % self.modulus).collect())
    }

    pub fn sub(&self, a: &WittCoefficient, b: &WittCoefficient) -> WittCoefficient {
        let m = self.modulus;
        WittCoefficient(a.0.iter().zip(&b.0).map(|(x, y)| (x + m - y) % m).collect())
    }

    pub fn neg(&self, a: &WittCoefficient) -> WittCoefficient {
        WittCoefficient(a.0.iter().map(|x| (self.modulus - x) % self.modulus).collect())
    }

    pub fn scale(&self, a: &WittCoefficient, c: u64) -> WittCoefficient {
        let m = self.modulus;
        WittCoefficient(a.0.iter().map(|&x| mul_mod(x, c % m, m)).collect())
    }

    pub fn mul(&self, a: &WittCoefficient, b: &WittCoefficient) -> WittCoefficient {
        let m = self.modulus;
        if self.n == 1 {
            return WittCoefficient(vec![mul_mod(a.0[0], b.0[0], m)]);
        }
        let mut prod = vec![0u128; 2 * self.n - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % m as u128;
            }
        }
        let mut prod: Vec<u64> = prod.into_iter().map(|c| c as u64).collect();
        self.reduce_y(&mut prod);
        prod.truncate(self.n);
        WittCoefficient(prod)
    }

    /// Reduces a coordinate vector of any length modulo `H`, in place.
    pub(crate) fn reduce_y(&self, v: &mut Vec<u64>) {
        let m = self.modulus;
        let n = self.n;
        for d in (n..v.len()).rev() {
            let c = v[d];
            if c == 0 {
                continue;
            }
            v[d] = 0;
            for j in 0..n {
                let idx = d - n + j;
                v[idx] = (v[idx] + m - mul_mod(c, self.lift[j], m)) % m;
            }
        }
        v.resize(n, 0);
    }

    pub fn pow(&self, a: &WittCoefficient, mut exp: u64) -> WittCoefficient {
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

    /// Inverse of a unit, by Newton iteration from the residue inverse.
    pub fn inv(&self, a: &WittCoefficient, field: &FiniteField) -> Option<WittCoefficient> {
        if self.n == 1 {
            return inv_mod(a.0[0], self.modulus).map(|c| WittCoefficient(vec![c]));
        }
        let r = field.inv(&self.reduce(a))?;
        let mut x = self.lift_residue(&r);
        let two = self.from_int(2);
        for _ in 0..newton_steps(self.k) {
            x = self.mul(&x, &self.sub(&two, &self.mul(a, &x)));
        }
        Some(x)
    }

    /// p-adic valuation: least `v_p` over the coordinates, `K` for zero.
    pub fn valuation(&self, a: &WittCoefficient) -> u32 {
        a.0.iter()
            .map(|&c| if c == 0 { self.k } else { c.trailing_zeros_base(self.p) })
            .min()
            .unwrap_or(self.k)
    }

    /// Exact division by `p` of an element with positive valuation; the
    /// quotient is determined modulo `p^(K-1)`.
    pub(crate) fn div_p(&self, a: &WittCoefficient) -> WittCoefficient {
        debug_assert!(a.0.iter().all(|c| c % self.p == 0));
        WittCoefficient(a.0.iter().map(|c| c / self.p).collect())
    }

    /// The Frobenius automorphism, reducing to `r -> r^p`.
    pub fn frobenius(&self, a: &WittCoefficient) -> WittCoefficient {
        let m = self.modulus;
        let mut out = vec![0u64; self.n];
        for (j, &c) in a.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &img) in out.iter_mut().zip(&self.frob_images[j]) {
                *o = (*o + mul_mod(c, img, m)) % m;
            }
        }
        WittCoefficient(out)
    }

    /// Teichmuller representative: the fixed point of `x -> x^(p^n)` above `r`.
    pub fn teichmuller(&self, r: &ResidueElement) -> WittCoefficient {
        let mut x = self.lift_residue(r);
        for _ in 0..=self.k {
            let mut next = x.clone();
            for _ in 0..self.n {
                next = self.pow(&next, self.p);
            }
            if next == x {
                break;
            }
            x = next;
        }
        x
    }

    fn eval_lift(&self, x: &WittCoefficient) -> WittCoefficient {
        self.lift.iter().rev().fold(self.zero(), |acc, &c| {
            self.add(&self.mul(&acc, x), &self.from_int(c as i64))
        })
    }

    fn eval_lift_derivative(&self, x: &WittCoefficient) -> WittCoefficient {
        self.lift.iter().enumerate().skip(1).rev().fold(self.zero(), |acc, (i, &c)| {
            self.add(&self.mul(&acc, x), &self.from_int((c * i as u64 % self.modulus) as i64))
        })
    }

    /// Hensel-lifts the root of `H` congruent to `y^p`.
    fn frobenius_root(&self, field: &FiniteField) -> WittCoefficient {
        if self.n == 1 {
            // H = y, whose only root is 0
            return self.zero();
        }
        let y = WittCoefficient({
            let mut v = vec![0; self.n];
            v[1] = 1;
            v
        });
        let mut root = self.pow(&y, self.p);
        for _ in 0..newton_steps(self.k) {
            let value = self.eval_lift(&root);
            let slope = self
                .inv(&self.eval_lift_derivative(&root), field)
                .expect("H is separable mod p");
            root = self.sub(&root, &self.mul(&value, &slope));
        }
        debug_assert!(self.is_zero(&self.eval_lift(&root)));
        root
    }
}

/// `ceil(log2(k)) + 1` Newton steps suffice for precision `p^k`.
pub(crate) fn newton_steps(k: u32) -> u32 {
    let mut steps = 0;
    while (1u64 << steps) < k as u64 {
        steps += 1;
    }
    steps + 1
}

trait TrailingZerosBase {
    fn trailing_zeros_base(self, base: u64) -> u32;
}

impl TrailingZerosBase for u64 {
    fn trailing_zeros_base(mut self, base: u64) -> u32 {
        let mut v = 0;
        while self.is_multiple_of(base) {
            self /= base;
            v += 1;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, n: usize, k: u32) -> (FiniteField, WittRing) {
        let f = FiniteField::new(p, n).unwrap();
        let w = WittRing::new(&f, k, p.pow(k));
        (f, w)
    }

    #[test]
    fn teichmuller_of_two_mod_25() {
        let (f, w) = ring(5, 1, 2);
        assert_eq!(w.teichmuller(&f.from_u64(2)).0, vec![7]);
    }

    #[test]
    fn teichmuller_matches_hensel_oracle() {
        // 2^(5^k) mod 5^K stabilises at the Teichmuller lift
        let (f, w) = ring(5, 1, 4);
        let m = 625u64;
        let mut x = 2u64;
        for _ in 0..6 {
            x = crate::fp_poly::pow_mod(x, 5, m);
        }
        assert_eq!(w.teichmuller(&f.from_u64(2)).0, vec![x]);
    }

    #[test]
    fn frobenius_root_is_a_root_and_has_order_n() {
        let (f, w) = ring(3, 3, 4);
        let a = WittCoefficient(vec![5, 17, 40]);
        let mut b = a.clone();
        for _ in 0..3 {
            b = w.frobenius(&b);
        }
        assert_eq!(a, b);
        assert_eq!(w.reduce(&w.frobenius(&a)), f.frobenius(&w.reduce(&a)));
    }

    #[test]
    fn teichmuller_is_multiplicative_and_frobenius_equivariant() {
        let (f, w) = ring(3, 2, 4);
        for i in 0..9 {
            for j in 0..9 {
                let r = f.element_from_index(i);
                let s = f.element_from_index(j);
                assert_eq!(
                    w.teichmuller(&f.mul(&r, &s)),
                    w.mul(&w.teichmuller(&r), &w.teichmuller(&s))
                );
            }
            let r = f.element_from_index(i);
            assert_eq!(w.frobenius(&w.teichmuller(&r)), w.teichmuller(&f.frobenius(&r)));
        }
    }

    #[test]
    fn inverse_of_unit() {
        let (f, w) = ring(5, 2, 3);
        let a = WittCoefficient(vec![7, 33]);
        let inv = w.inv(&a, &f).unwrap();
        assert_eq!(w.mul(&a, &inv), w.one());
    }
}
