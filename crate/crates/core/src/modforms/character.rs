use std::sync::Arc;

use num_integer::Integer;

use super::ModFormError;
use crate::field::{FiniteField, ResidueElement};

/// A Dirichlet character mod `N` with values in F_{p^m}, stored as the table
/// `ε(0), …, ε(N-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    field: Arc<FiniteField>,
    modulus: u64,
    values: Vec<ResidueElement>,
}

impl DirichletCharacter {
    /// Checks `ε(1) = 1`, vanishing exactly off `(Z/N)^*`, and
    /// multiplicativity on all pairs of units.
    pub fn new(field: Arc<FiniteField>, values: Vec<ResidueElement>) -> Result<Self, ModFormError> {
        let n = values.len() as u64;
        let bad = |msg: String| Err(ModFormError::InvalidCharacter(msg));
        if n == 0 {
            return bad("empty value table".into());
        }
        if values.iter().any(|v| v.coeffs().len() != field.degree() || v.coeffs().iter().any(|&c| c >= field.p())) {
            return bad("value outside the coefficient field".into());
        }
        if values[1 % n as usize] != field.one() {
            return bad("eps(1) != 1".into());
        }
        for a in 0..n {
            let unit = a.gcd(&n) == 1;
            if unit == values[a as usize].is_zero() {
                return bad(format!("eps({a}) must be {}", if unit { "nonzero" } else { "zero" }));
            }
        }
        for a in (0..n).filter(|a| a.gcd(&n) == 1) {
            for b in (a..n).filter(|b| b.gcd(&n) == 1) {
                let lhs = &values[(a * b % n) as usize];
                if *lhs != field.mul(&values[a as usize], &values[b as usize]) {
                    return bad(format!("eps({a}*{b}) != eps({a}) eps({b})"));
                }
            }
        }
        Ok(DirichletCharacter { field, modulus: n, values })
    }

    pub fn trivial(field: Arc<FiniteField>, modulus: u64) -> Result<Self, ModFormError> {
        let values = (0..modulus)
            .map(|a| if a.gcd(&modulus) == 1 { field.one() } else { field.zero() })
            .collect();
        Self::new(field, values)
    }

    /// The Kronecker symbol `(d/·)` as a character mod `|d|`; `d` should be a
    /// fundamental discriminant.
    pub fn quadratic(field: Arc<FiniteField>, d: i64) -> Result<Self, ModFormError> {
        let n = d.unsigned_abs();
        let values = (0..n).map(|a| field.from_i64(kronecker(d, a))).collect();
        Self::new(field, values)
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[ResidueElement] {
        &self.values
    }

    pub fn eval(&self, a: u64) -> ResidueElement {
        self.values[(a % self.modulus) as usize].clone()
    }

    /// `ε(-1)`.
    pub fn eval_minus_one(&self) -> ResidueElement {
        self.values[(self.modulus - 1) as usize].clone()
    }

    pub fn is_trivial(&self) -> bool {
        self.modulus == 1
    }

    /// The character mod `lcm(N1, N2)` given by `a -> ε1(a) ε2(a)`.
    pub fn product(&self, other: &Self) -> Result<Self, ModFormError> {
        if self.field != other.field {
            return Err(ModFormError::FieldMismatch);
        }
        let n = self.modulus.lcm(&other.modulus);
        let values = (0..n).map(|a| self.field.mul(&self.eval(a), &other.eval(a))).collect();
        Self::new(self.field.clone(), values)
    }

    /// `ε(a)` as an integer when it is 0 or ±1.
    pub fn lifted(&self, a: u64) -> Result<i64, ModFormError> {
        let v = self.eval(a);
        let f = &self.field;
        if v.is_zero() {
            Ok(0)
        } else if v == f.one() {
            Ok(1)
        } else if v == f.from_i64(-1) {
            Ok(-1)
        } else {
            Err(ModFormError::NotLiftable(v.to_string()))
        }
    }
}

/// Kronecker symbol `(d/n)` for `n ≥ 0`.
pub(crate) fn kronecker(d: i64, n: u64) -> i64 {
    if n == 0 {
        return i64::from(d.abs() == 1);
    }
    let mut n = n;
    let mut result = 1i64;
    while n.is_multiple_of(2) {
        n /= 2;
        result *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    if result == 0 {
        return 0;
    }
    // Jacobi symbol (d/n) for odd n
    let mut a = d.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}
