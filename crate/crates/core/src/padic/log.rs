//! p-adic logarithm, logarithmic derivative and p-adic powers of 1-units.

use super::{CycloElement, PadicError};
use crate::field::ResidueElement;
use crate::fp_poly::inv_mod;

impl CycloElement {
    /// `log(a) = Σ_{k≥1} (-1)^{k+1} (a-1)^k / k` for a 1-unit `a`.
    ///
    /// Division by `p^v` at term `k = p^v m` costs `(p-1)v` digits of the
    /// term's own precision; the result's [`precision`](Self::precision) is the
    /// guaranteed output precision `M_out`. For the default context
    /// (`K = ceil(M/(p-1)) + 1`) no digits are lost and `M_out = M`.
    pub fn log_one_unit(&self) -> Result<CycloElement, PadicError> {
        if !self.is_one_unit() {
            return Err(PadicError::NotAOneUnit);
        }
        let ctx = self.context().clone();
        let p = ctx.p() as usize;
        let modulus = ctx.coefficient_modulus();
        let target = self.precision();
        let z = self - &CycloElement::one(&ctx);
        let vz = z.valuation();
        if vz >= target {
            return Ok(CycloElement::zero(&ctx).with_precision_unchecked(target));
        }

        let limit = 4 * target + 4 * p;
        let max_v = {
            let (mut v, mut pk) = (0usize, p);
            while pk <= limit {
                v += 1;
                pk *= p;
            }
            v
        };
        // p = π^{p-1} · p_unit, so 1/p^v = π^{-(p-1)v} · p_unit^{-v}
        let mut p_unit = CycloElement::from_int(&ctx, p as i64).with_precision_unchecked(usize::MAX);
        for _ in 0..p - 1 {
            p_unit = p_unit.div_pi();
        }
        let p_unit_inv = p_unit.inverse()?;
        let mut acc = CycloElement::zero(&ctx).with_precision_unchecked(usize::MAX);
        let mut power = z.clone();
        for k in 1..=limit {
            if k * vz >= target + (p - 1) * max_v {
                break;
            }
            let (mut v, mut unit) = (0usize, k as u64);
            while unit % p as u64 == 0 {
                unit /= p as u64;
                v += 1;
            }
            if k * vz < target + (p - 1) * v {
                let mut term = power.clone();
                for _ in 0..(p - 1) * v {
                    term = term.div_pi();
                }
                let inv = inv_mod(unit % modulus, modulus).expect("unit part of k");
                term = term.scale_int(inv);
                for _ in 0..v {
                    term = &term * &p_unit_inv;
                }
                acc = if k % 2 == 1 { &acc + &term } else { &acc - &term };
            }
            power = &power * &z;
        }
        let prec = acc.precision().min(target);
        Ok(acc.with_precision_unchecked(prec))
    }

    /// Constant π-digit of `a'(x)/a(x)`, the derivative taken on the stored
    /// representative. The choice of representative changes `a'` by a
    /// multiple of `E'(π)`, of valuation `p - 2 ≥ 1`.
    pub fn dlog_mod_pi(&self) -> Result<ResidueElement, PadicError> {
        if !self.is_unit() {
            return Err(PadicError::NotAUnit);
        }
        let ratio = &self.derivative() * &self.inverse()?;
        Ok(ratio.residue())
    }

    /// `a^e` for a 1-unit `a` and `e` taken modulo `p^K`. Well defined since
    /// `(1 + πR)^{p^K} ⊆ 1 + π^{K(p-1)+1} R`, which vanishes in R/p^K.
    pub fn pow_padic(&self, e: u64) -> Result<CycloElement, PadicError> {
        if !self.is_one_unit() {
            return Err(PadicError::NotAOneUnit);
        }
        Ok(self.pow(e % self.context().coefficient_modulus()))
    }

    /// [`pow_padic`](Self::pow_padic) for a signed exponent.
    pub fn pow_padic_signed(&self, e: i64) -> Result<CycloElement, PadicError> {
        let m = self.context().coefficient_modulus() as i128;
        self.pow_padic((e as i128).rem_euclid(m) as u64)
    }
}
