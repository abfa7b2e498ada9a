use std::sync::Arc;

use super::{make_context, CycloElement, PadicError, PrimeContext};
use crate::field::Embedding;

impl CycloElement {
    /// Re-expresses a `frobenius^n`-invariant element in the context of
    /// residue degree `n`, digit by digit through its tracked precision.
    pub fn descend_subfield(&self, n: usize) -> Result<CycloElement, PadicError> {
        let ctx = self.context();
        let n_work = ctx.n_work();
        if n == 0 || !n_work.is_multiple_of(n) {
            return Err(PadicError::NotADivisor { n, n_work });
        }
        let digits = self.digits().digits;
        let field = ctx.residue_field();
        if let Some(position) = digits.iter().position(|d| !field.in_subfield(d, n)) {
            return Err(PadicError::NotInvariant { n, position });
        }
        if n == n_work {
            return Ok(self.clone());
        }
        let sub = make_context(ctx.p(), n, ctx.precision())?;
        let emb = Embedding::new(sub.residue_field(), field)?;
        let sub_digits: Vec<_> = digits
            .iter()
            .map(|d| emb.preimage(d).expect("subfield digit has a preimage"))
            .collect();
        Ok(CycloElement::from_digits(&sub, &sub_digits).truncate(self.precision()))
    }

    /// Image of this element in a context whose residue degree is a multiple
    /// of ours (inverse of [`descend_subfield`](Self::descend_subfield)).
    pub fn embed_into(&self, big: &Arc<PrimeContext>) -> Result<CycloElement, PadicError> {
        let ctx = self.context();
        if big.p() != ctx.p() || !big.n_work().is_multiple_of(ctx.n_work()) {
            return Err(PadicError::NotADivisor { n: ctx.n_work(), n_work: big.n_work() });
        }
        let emb = Embedding::new(ctx.residue_field(), big.residue_field())?;
        let digits: Vec<_> = self.digits().digits.iter().map(|d| emb.map(d)).collect();
        Ok(CycloElement::from_digits(big, &digits).truncate(self.precision()))
    }
}
