//! Dense polynomials over the prime field F_p.
//!
//! Coefficients are stored little-endian (`c[i]` multiplies `y^i`) and kept
//! trimmed: the zero polynomial is the empty vector.

pub(crate) type Poly = Vec<u64>;

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`.
pub(crate) fn inv_mod_prime(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// Inverse of a unit modulo `m` (any modulus) by extended Euclid.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo the nonzero polynomial `m`.
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Poly {
    let dm = degree(m).expect("division by zero polynomial");
    let lead_inv = inv_mod_prime(m[dm], p).expect("leading coefficient is a unit");
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = mul_mod(r[dr], lead_inv, p);
        let shift = dr - dm;
        for (j, &mj) in m.iter().enumerate().take(dm + 1) {
            let idx = shift + j;
            r[idx] = (r[idx] + p - mul_mod(c, mj, p)) % p;
        }
        r = trim(r);
    }
    r
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(d) = degree(&x) {
        let inv = inv_mod_prime(x[d], p).unwrap();
        for c in x.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
    x
}

/// `y^(p^d) mod m`, by `d` successive p-th powerings of `y`.
pub(crate) fn y_pow_p_iter(d: usize, m: &[u64], p: u64) -> Poly {
    let mut acc = rem(&[0, 1], m, p);
    for _ in 0..d {
        acc = powmod(&acc, p, m, p);
    }
    acc
}

pub(crate) fn powmod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Poly {
    let mut acc = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), m, p);
        }
        b = rem(&mul(&b, &b, p), m, p);
        exp >>= 1;
    }
    acc
}

/// Irreducibility of a monic `f` of degree `n` over F_p: `y^(p^n) = y mod f`
/// and `gcd(y^(p^d) - y, f) = 1` for every proper divisor `d` of `n`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = match degree(f) {
        Some(0) | None => return false,
        Some(n) => n,
    };
    if n == 1 {
        return true;
    }
    let y: Poly = vec![0, 1];
    if sub(&y_pow_p_iter(n, f, p), &rem(&y, f, p), p) != Vec::<u64>::new() {
        return false;
    }
    (1..n).filter(|d| n % d == 0).all(|d| {
        let g = gcd(&sub(&y_pow_p_iter(d, f, p), &y, p), f, p);
        degree(&g) == Some(0)
    })
}

/// The least monic irreducible polynomial of degree `n` over F_p, where
/// candidates are ordered by comparing coefficients from `y^(n-1)` down to
/// the constant term. Degree 1 yields `y`.
pub(crate) fn least_irreducible(p: u64, n: usize) -> Option<Poly> {
    assert!(n >= 1);
    let mut index: u128 = 0;
    let limit = (p as u128).checked_pow(n as u32);
    loop {
        if let Some(l) = limit {
            if index >= l {
                return None;
            }
        }
        let mut f = vec![0u64; n + 1];
        let mut rest = index;
        for c in f.iter_mut().take(n) {
            *c = (rest % p as u128) as u64;
            rest /= p as u128;
        }
        f[n] = 1;
        if is_irreducible(&f, p) {
            return Some(f);
        }
        index += 1;
    }
}
