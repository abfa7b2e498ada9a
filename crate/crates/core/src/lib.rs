//! Computable splitting criterion for mod-p Galois representations attached
//! to ordinary eigenforms in the exceptional case `k = p`, `ε(p) = a_p²`.
//!
//! * [`padic`]: exact arithmetic in truncated rings of integers of
//!   unramified extensions of Q_p(ζ_p), with Frobenius, the cyclotomic
//!   automorphisms, Teichmuller digits, `log` and `dlog`.
//! * [`units`]: classes of 1-units modulo p-th powers, the normal form
//!   `ζ^s (1+π^p)^t`, eigenspace checks and the enumeration oracle.
//! * [`descent`]: the Frobenius equation solver, the passage from the
//!   Serre–Tate invariant `q` to `q_p`, and the splitting verdict.
//! * [`modforms`]: mod-p q-expansions, θ, Hecke operators, Eisenstein
//!   series, companion forms and the exceptional-case predicate.
//! * [`pipeline`]: JSON job documents, the batch runner and report output.

pub mod descent;
pub mod exec;
pub mod field;
mod fp_poly;
pub mod modforms;
pub mod padic;
pub mod pipeline;
pub mod selftest;
pub mod units;

pub use field::{FiniteField, ResidueElement};
pub use padic::{default_context, make_context, CycloElement, PrimeContext};
