//! The integral symplectic form preserved by a pair of generators.
//!
//! The form is found by solving `GᵀΩG = Ω` for both generators over the
//! rationals in the `n(2n-1)` strictly upper-triangular unknowns. For an
//! irreducible hypergeometric group the solution space is a line; its
//! primitive integral generator (first nonzero upper entry positive) is the
//! canonical form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::group::{Generators, Transvection};
use crate::linalg::{self, rational_nullspace, IntMatrix, IntVector, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("no invariant antisymmetric form")]
    NoForm,
    #[error("invariant forms span a space of dimension {0}; expected 1")]
    NotUnique(usize),
    #[error("invariant form is degenerate")]
    Degenerate,
    #[error("vector length {actual} does not match form dimension {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("transvection row is not a multiple of v_Rᵀ Ω")]
    NotProportional,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticForm {
    omega: IntMatrix,
}

impl SymplecticForm {
    pub fn matrix(&self) -> &IntMatrix {
        &self.omega
    }

    pub fn dim(&self) -> usize {
        self.omega.rows()
    }

    /// `xᵀ Ω y`.
    pub fn pairing(&self, x: &[BigInt], y: &[BigInt]) -> Result<BigInt, FormError> {
        for v in [x, y] {
            if v.len() != self.dim() {
                return Err(FormError::LengthMismatch {
                    expected: self.dim(),
                    actual: v.len(),
                });
            }
        }
        let omega_y = self.omega.mul_vec(y).expect("length checked");
        Ok(linalg::dot(x, &omega_y))
    }

    /// The row `v_Rᵀ Ω`, i.e. `Ω(v_R, ·)`.
    pub fn covector(&self, v: &[BigInt]) -> Result<IntVector, FormError> {
        self.omega
            .row_mul(v)
            .map_err(|_| FormError::LengthMismatch {
                expected: self.dim(),
                actual: v.len(),
            })
    }

    pub fn is_invariant_under(&self, g: &IntMatrix) -> bool {
        g.transpose()
            .mul(&self.omega)
            .and_then(|m| m.mul(g))
            .is_ok_and(|m| m == self.omega)
    }

    /// The scalar `λ` with `v_L = λ · v_Rᵀ Ω`.
    pub fn transvection_scalar(&self, t: &Transvection) -> Result<BigRational, FormError> {
        let row = self.covector(&t.v_r)?;
        let pivot = row
            .iter()
            .position(|e| !e.is_zero())
            .ok_or(FormError::NotProportional)?;
        let lambda = BigRational::new(t.v_l[pivot].clone(), row[pivot].clone());
        let consistent = row.iter().zip(&t.v_l).all(|(r, l)| {
            BigRational::from_integer(l.clone()) == &lambda * BigRational::from_integer(r.clone())
        });
        if !consistent || lambda.is_zero() {
            return Err(FormError::NotProportional);
        }
        Ok(lambda)
    }
}

/// Index pairs `(i, j)` with `i < j`, in row-major order.
fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

fn antisymmetric(n: usize, values: &[BigInt]) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    for (&(i, j), v) in upper_pairs(n).iter().zip(values) {
        m.set(i, j, v.clone());
        m.set(j, i, -v.clone());
    }
    m
}

/// Basis of the antisymmetric forms invariant under both generators.
pub fn invariant_form_space(gens: &Generators) -> Vec<IntMatrix> {
    let n = gens.dim();
    let pairs = upper_pairs(n);
    let mats = [gens.a(), gens.b()];
    // Column u of the system holds the upper entries of GᵀE_uG - E_u for both
    // generators, where E_u is the elementary antisymmetric matrix of pair u.
    let mut columns: Vec<Vec<BigInt>> = Vec::with_capacity(pairs.len());
    for u in 0..pairs.len() {
        let mut unit = vec![BigInt::zero(); pairs.len()];
        unit[u] = BigInt::one();
        let e = antisymmetric(n, &unit);
        let mut col = Vec::with_capacity(2 * pairs.len());
        for g in mats {
            let image = g
                .transpose()
                .mul(&e)
                .and_then(|m| m.mul(g))
                .expect("square");
            let diff = image.sub(&e).expect("same shape");
            col.extend(pairs.iter().map(|&(i, j)| diff[(i, j)].clone()));
        }
        columns.push(col);
    }
    let system = RatMatrix::from_fn(2 * pairs.len(), pairs.len(), |r, c| {
        BigRational::from_integer(columns[c][r].clone())
    });
    rational_nullspace(&system)
        .iter()
        .map(|v| antisymmetric(n, v))
        .collect()
}

/// The canonical integral invariant form of the group.
pub fn solve_invariant_form(gens: &Generators) -> Result<SymplecticForm, FormError> {
    let mut space = invariant_form_space(gens);
    match space.len() {
        0 => return Err(FormError::NoForm),
        1 => {}
        k => return Err(FormError::NotUnique(k)),
    }
    let omega = space.pop().expect("one basis vector");
    if omega.determinant().expect("square").is_zero() {
        return Err(FormError::Degenerate);
    }
    Ok(SymplecticForm { omega })
}
