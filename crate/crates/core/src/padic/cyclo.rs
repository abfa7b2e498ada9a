use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{PadicError, PrimeContext, WittCoefficient};
use crate::field::ResidueElement;
use crate::fp_poly::mul_mod;

/// Element of R/π^M. Coefficients are stored row-major: row `i` holds the
/// W_K coordinates of the coefficient of `x^i`, `0 <= i < p - 1`.
#[derive(Clone)]
pub struct CycloElement {
    ctx: Arc<PrimeContext>,
    coeffs: Vec<u64>,
    prec: usize,
}

/// Teichmuller-digit expansion `Σ teich(d_i) π^i`, little-endian in π.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiDigitExpansion {
    pub digits: Vec<ResidueElement>,
}

impl PiDigitExpansion {
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.digits.first().is_some_and(|d| !d.is_zero())
    }
}

impl fmt::Display for PiDigitExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .digits
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let d = if d.coeffs().len() > 1 { format!("({d})") } else { d.to_string() };
                match i {
                    0 => d,
                    1 => format!("{d}·π"),
                    _ => format!("{d}·π^{i}"),
                }
            })
            .collect();
        write!(f, "{} + O(π^{})", terms.join(" + "), self.digits.len())
    }
}

impl CycloElement {
    fn raw(ctx: &Arc<PrimeContext>, coeffs: Vec<u64>, prec: usize) -> Self {
        CycloElement { ctx: Arc::clone(ctx), coeffs, prec: prec.min(ctx.capacity()) }
    }

    fn rows(&self) -> usize {
        self.ctx.p as usize - 1
    }

    fn width(&self) -> usize {
        self.ctx.n_work
    }

    pub fn context(&self) -> &Arc<PrimeContext> {
        &self.ctx
    }

    /// Number of meaningful π-adic digits.
    pub fn precision(&self) -> usize {
        self.prec
    }

    /// Drops digits at and beyond position `m` (never raises precision).
    pub fn truncate(&self, m: usize) -> Self {
        let mut out = self.clone();
        out.prec = self.prec.min(m);
        out
    }

    /// Coefficient of `x^i` in the stored representative.
    pub fn coefficient(&self, i: usize) -> WittCoefficient {
        let w = self.width();
        WittCoefficient(self.coeffs[i * w..(i + 1) * w].to_vec())
    }

    pub fn zero(ctx: &Arc<PrimeContext>) -> Self {
        let len = (ctx.p as usize - 1) * ctx.n_work;
        Self::raw(ctx, vec![0; len], ctx.precision)
    }

    pub fn from_int(ctx: &Arc<PrimeContext>, c: i64) -> Self {
        Self::from_witt(ctx, &ctx.witt.from_int(c))
    }

    pub fn one(ctx: &Arc<PrimeContext>) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_witt(ctx: &Arc<PrimeContext>, c: &WittCoefficient) -> Self {
        let mut out = Self::zero(ctx);
        out.coeffs[..ctx.n_work].copy_from_slice(&c.0);
        out
    }

    /// The uniformizer π = 1 - ζ_p.
    pub fn pi(ctx: &Arc<PrimeContext>) -> Self {
        // x^1 is a basis element since p - 1 >= 2
        let mut out = Self::zero(ctx);
        out.coeffs[ctx.n_work] = 1;
        out
    }

    /// ζ_p = 1 - π.
    pub fn zeta(ctx: &Arc<PrimeContext>) -> Self {
        &Self::one(ctx) - &Self::pi(ctx)
    }

    /// `π^i`, reduced modulo `E`.
    pub fn pi_pow(ctx: &Arc<PrimeContext>, i: usize) -> Self {
        Self::pi(ctx).pow(i as u64)
    }

    pub fn teichmuller(ctx: &Arc<PrimeContext>, r: &ResidueElement) -> Self {
        Self::from_witt(ctx, &ctx.teichmuller(r))
    }

    /// `Σ teich(d_i) π^i`; digits beyond the given list are zero.
    pub fn from_digits(ctx: &Arc<PrimeContext>, digits: &[ResidueElement]) -> Self {
        let pi = Self::pi(ctx);
        let mut acc = Self::zero(ctx);
        let mut power = Self::one(ctx);
        for d in digits {
            if !d.is_zero() {
                acc = &acc + &(&Self::teichmuller(ctx, d) * &power);
            }
            power = &power * &pi;
        }
        acc.prec = ctx.precision;
        acc
    }

    fn check_ctx(&self, other: &Self) {
        assert!(self.ctx.same_as(&other.ctx), "{}", PadicError::ContextMismatch);
    }

    /// π-adic valuation, capped at the tracked precision.
    pub fn valuation(&self) -> usize {
        let p = self.ctx.p as usize;
        (0..self.rows())
            .map(|i| (p - 1) * self.ctx.witt.valuation(&self.coefficient(i)) as usize + i)
            .min()
            .unwrap_or(usize::MAX)
            .min(self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.valuation() >= self.prec
    }

    /// `self ≡ other (mod π^m)`; false when either side is not known to `m` digits.
    pub fn congruent(&self, other: &Self, m: usize) -> bool {
        self.check_ctx(other);
        self.prec >= m && other.prec >= m && (self - other).truncate(m).is_zero()
    }

    /// Leading digit, i.e. the reduction modulo π.
    pub fn residue(&self) -> ResidueElement {
        self.ctx.witt.reduce(&self.coefficient(0))
    }

    pub fn is_unit(&self) -> bool {
        self.prec > 0 && !self.residue().is_zero()
    }

    pub fn is_one_unit(&self) -> bool {
        self.prec > 0 && self.residue() == self.ctx.field.one()
    }

    /// Exact division by π of an element of positive valuation; loses one digit.
    pub(crate) fn div_pi(&self) -> Self {
        let w = self.width();
        let rows = self.rows();
        let witt = &self.ctx.witt;
        let m = self.ctx.modulus;
        let c0 = self.coefficient(0);
        debug_assert!(c0.0.iter().all(|c| c % self.ctx.p == 0), "not divisible by π");
        let q = witt.div_p(&c0);
        let mut out = vec![0u64; rows * w];
        // c_0 / x = (c_0 / p) * (-F(x)), plus the shifted higher coefficients
        for i in 0..rows {
            let f = self.ctx.p_over_pi[i];
            for j in 0..w {
                let mut v = mul_mod(q.0[j], f, m);
                if i + 1 < rows {
                    v = (v + self.coeffs[(i + 1) * w + j]) % m;
                }
                out[i * w + j] = v;
            }
        }
        Self::raw(&self.ctx, out, self.prec.saturating_sub(1))
    }

    /// Digit expansion through position `precision - 1`.
    pub fn digits(&self) -> PiDigitExpansion {
        let mut digits = Vec::with_capacity(self.prec);
        let mut cur = self.clone();
        for _ in 0..self.prec {
            let d = cur.residue();
            if !d.is_zero() {
                cur = &cur - &Self::teichmuller(&self.ctx, &d);
            }
            digits.push(d);
            cur = cur.div_pi();
        }
        PiDigitExpansion { digits }
    }

    /// The digit at position `i < precision`.
    pub fn digit(&self, i: usize) -> ResidueElement {
        assert!(i < self.prec, "digit {i} beyond precision {}", self.prec);
        self.truncate(i + 1).digits().digits.pop().unwrap()
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        if exp == 0 {
            return Self::one(&self.ctx).with_precision_unchecked(self.prec);
        }
        // exact 1, so the running precision is inherited from the factors
        let mut acc = Self::one(&self.ctx).with_precision_unchecked(usize::MAX);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn inverse(&self) -> Result<Self, PadicError> {
        if !self.is_unit() {
            return Err(PadicError::NotAUnit);
        }
        let witt = &self.ctx.witt;
        let c0_inv = witt
            .inv(&self.coefficient(0), &self.ctx.field)
            .ok_or(PadicError::NotAUnit)?;
        let mut exact = self.clone();
        exact.prec = self.ctx.capacity();
        let mut y = Self::from_witt(&self.ctx, &c0_inv);
        y.prec = self.ctx.capacity();
        let mut two = Self::from_int(&self.ctx, 2);
        two.prec = self.ctx.capacity();
        let cap = self.ctx.capacity();
        let mut steps = 0;
        while (1usize << steps) < cap {
            steps += 1;
        }
        for _ in 0..=steps {
            y = &y * &(&two - &(&exact * &y));
        }
        y.prec = self.prec;
        Ok(y)
    }

    pub fn div(&self, other: &Self) -> Result<Self, PadicError> {
        Ok(self * &other.inverse()?)
    }

    /// Frobenius: acts on W_K coefficients, fixes π and ζ_p.
    pub fn frobenius(&self) -> Self {
        let w = self.width();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for i in 0..self.rows() {
            out.extend(self.ctx.witt.frobenius(&self.coefficient(i)).0);
        }
        debug_assert_eq!(out.len(), self.rows() * w);
        Self::raw(&self.ctx, out, self.prec)
    }

    pub fn frobenius_iter(&self, k: usize) -> Self {
        (0..k % self.ctx.n_work).fold(self.clone(), |acc, _| acc.frobenius())
    }

    /// The automorphism σ_u: ζ_p -> ζ_p^u, fixing the unramified coefficients.
    pub fn sigma(&self, u: u64) -> Result<Self, PadicError> {
        let p = self.ctx.p;
        if u.is_multiple_of(p) {
            return Err(PadicError::InvalidSigma(u));
        }
        let ctx = &self.ctx;
        let one = Self::one(ctx);
        let image = &one - &Self::zeta(ctx).pow(u % p);
        let mut acc = Self::zero(ctx);
        for i in (0..self.rows()).rev() {
            acc = &(&acc * &image) + &Self::from_witt(ctx, &self.coefficient(i));
        }
        acc.prec = self.prec;
        Ok(acc)
    }

    /// Formal derivative of the stored representative in `x`.
    pub(crate) fn derivative(&self) -> Self {
        let w = self.width();
        let m = self.ctx.modulus;
        let mut out = vec![0u64; self.coeffs.len()];
        for i in 1..self.rows() {
            for j in 0..w {
                out[(i - 1) * w + j] = mul_mod(self.coeffs[i * w + j], i as u64, m);
            }
        }
        Self::raw(&self.ctx, out, self.prec)
    }

    pub(crate) fn with_precision_unchecked(mut self, prec: usize) -> Self {
        self.prec = prec.min(self.ctx.capacity());
        self
    }

    pub(crate) fn scale_int(&self, c: u64) -> Self {
        let m = self.ctx.modulus;
        let coeffs = self.coeffs.iter().map(|&x| mul_mod(x, c % m, m)).collect();
        Self::raw(&self.ctx, coeffs, self.prec)
    }
}

impl PartialEq for CycloElement {
    fn eq(&self, other: &Self) -> bool {
        self.prec == other.prec && self.congruent(other, self.prec)
    }
}

impl Eq for CycloElement {}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.digits())
    }
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.digits())
    }
}

impl Add for &CycloElement {
    type Output = CycloElement;

    fn add(self, rhs: &CycloElement) -> CycloElement {
        self.check_ctx(rhs);
        let m = self.ctx.modulus;
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| (a + b) % m).collect();
        CycloElement::raw(&self.ctx, coeffs, self.prec.min(rhs.prec))
    }
}

impl Sub for &CycloElement {
    type Output = CycloElement;

    fn sub(self, rhs: &CycloElement) -> CycloElement {
        self.check_ctx(rhs);
        let m = self.ctx.modulus;
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| (a + m - b) % m).collect();
        CycloElement::raw(&self.ctx, coeffs, self.prec.min(rhs.prec))
    }
}

impl Neg for &CycloElement {
    type Output = CycloElement;

    fn neg(self) -> CycloElement {
        let m = self.ctx.modulus;
        let coeffs = self.coeffs.iter().map(|a| (m - a) % m).collect();
        CycloElement::raw(&self.ctx, coeffs, self.prec)
    }
}

impl Mul for &CycloElement {
    type Output = CycloElement;

    fn mul(self, rhs: &CycloElement) -> CycloElement {
        self.check_ctx(rhs);
        let ctx = &self.ctx;
        let m = ctx.modulus;
        let rows = self.rows();
        let w = self.width();
        let prow = 2 * w - 1;
        let xrows = 2 * rows - 1;
        let small = m < (1u64 << 31);
        let mut acc = vec![0u128; xrows * prow];
        for i1 in 0..rows {
            for j1 in 0..w {
                let a = self.coeffs[i1 * w + j1];
                if a == 0 {
                    continue;
                }
                for i2 in 0..rows {
                    let base = (i1 + i2) * prow + j1;
                    for j2 in 0..w {
                        let b = rhs.coeffs[i2 * w + j2];
                        let t = a as u128 * b as u128;
                        let slot = &mut acc[base + j2];
                        *slot = if small { *slot + t } else { (*slot + t) % m as u128 };
                    }
                }
            }
        }
        let mut grid: Vec<u64> = acc.into_iter().map(|v| (v % m as u128) as u64).collect();
        // reduce modulo E(x), which is monic of degree p - 1
        for d in (rows..xrows).rev() {
            for j in 0..prow {
                let c = grid[d * prow + j];
                if c == 0 {
                    continue;
                }
                grid[d * prow + j] = 0;
                for (i, &e) in ctx.eisenstein[..rows].iter().enumerate() {
                    let idx = (d - rows + i) * prow + j;
                    grid[idx] = (grid[idx] + m - mul_mod(c, e, m)) % m;
                }
            }
        }
        let mut coeffs = Vec::with_capacity(rows * w);
        for i in 0..rows {
            let mut row = grid[i * prow..(i + 1) * prow].to_vec();
            ctx.witt.reduce_y(&mut row);
            coeffs.extend(row);
        }
        let prec = (self.prec.saturating_add(rhs.valuation()))
            .min(rhs.prec.saturating_add(self.valuation()));
        CycloElement::raw(ctx, coeffs, prec)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for CycloElement {
            type Output = CycloElement;
            fn $f(self, rhs: CycloElement) -> CycloElement {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&CycloElement> for CycloElement {
            type Output = CycloElement;
            fn $f(self, rhs: &CycloElement) -> CycloElement {
                (&self).$f(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;

    #[test]
    fn zeta_to_the_p_is_one() {
        for p in [3u64, 5, 7, 11] {
            let ctx = make_context(p, 1, p as usize + 2).unwrap();
            let z = CycloElement::zeta(&ctx);
            assert_eq!(z.pow(p), CycloElement::one(&ctx));
            assert!(z.pow(p - 1) != CycloElement::one(&ctx));
        }
    }

    #[test]
    fn zeta_digits() {
        let ctx = make_context(5, 1, 7).unwrap();
        let d = CycloElement::zeta(&ctx).digits();
        let f = ctx.residue_field();
        let mut expect = vec![f.one(), f.from_i64(-1)];
        expect.resize(7, f.zero());
        assert_eq!(d.digits, expect);
        assert_eq!(CycloElement::zero(&ctx).digits().digits, vec![f.zero(); 7]);
    }

    #[test]
    fn p_over_pi_to_the_p_minus_one_is_minus_one_unit() {
        for p in [3u64, 5, 7] {
            let ctx = make_context(p, 1, p as usize + 2).unwrap();
            let mut q = CycloElement::from_int(&ctx, p as i64);
            for _ in 0..p - 1 {
                q = q.div_pi();
            }
            assert!(q.is_unit());
            assert_eq!(q.residue(), ctx.residue_field().from_i64(-1));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let ctx = make_context(5, 2, 7).unwrap();
        let f = ctx.residue_field();
        let a = CycloElement::from_digits(
            &ctx,
            &[f.from_coeffs(&[2, 1]), f.from_u64(3), f.zero(), f.from_coeffs(&[0, 4])],
        );
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, CycloElement::one(&ctx));
        assert!(CycloElement::pi(&ctx).inverse().is_err());
    }

    #[test]
    fn sigma_on_zeta_and_pi() {
        let ctx = make_context(7, 1, 9).unwrap();
        let z = CycloElement::zeta(&ctx);
        let pi = CycloElement::pi(&ctx);
        for u in 1..7 {
            assert_eq!(z.sigma(u).unwrap(), z.pow(u));
            let expect = &CycloElement::one(&ctx) - &z.pow(u);
            assert_eq!(pi.sigma(u).unwrap(), expect);
        }
        assert!(matches!(z.sigma(7), Err(PadicError::InvalidSigma(7))));
    }

    #[test]
    fn display_is_little_endian() {
        let ctx = make_context(3, 1, 4).unwrap();
        let s = CycloElement::zeta(&ctx).to_string();
        assert_eq!(s, "1 + 2·π + 0·π^2 + 0·π^3 + O(π^4)");
    }
}
