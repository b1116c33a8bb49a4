//! Dense exact linear algebra over the integers and the rationals.
//!
//! Everything here works on arbitrary-precision values. No operation rounds:
//! integer matrices stay integral, rational elimination keeps reduced
//! fractions, and determinants use fraction-free (Bareiss) elimination.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Integer column or row vector.
pub type IntVector = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left_rows}x{left_cols} against {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not unimodular: determinant {det}")]
    NotUnimodular { det: BigInt },
    #[error("expected {expected} entries, got {actual}")]
    BadLength { expected: usize, actual: usize },
}

/// Dense integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::BadLength {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from small integer rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| BigInt::from(rows[i].as_ref()[j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> IntVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<IntVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.data.iter().map(|e| e.abs()).max().unwrap_or_default()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        mat_mul(self, other)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn neg(&self) -> IntMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| -e).collect(),
        }
    }

    fn check_same_shape(&self, other: &IntMatrix) -> Result<(), LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(self.mismatch(other));
        }
        Ok(())
    }

    fn mismatch(&self, other: &IntMatrix) -> LinalgError {
        LinalgError::DimensionMismatch {
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: other.rows,
            right_cols: other.cols,
        }
    }

    /// `self · v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[BigInt]) -> Result<IntVector, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::BadLength {
                expected: self.cols,
                actual: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `v · self` for a row vector `v`.
    pub fn row_mul(&self, v: &[BigInt]) -> Result<IntVector, LinalgError> {
        if v.len() != self.rows {
            return Err(LinalgError::BadLength {
                expected: self.rows,
                actual: v.len(),
            });
        }
        Ok((0..self.cols)
            .map(|j| {
                v.iter()
                    .enumerate()
                    .fold(BigInt::zero(), |acc, (i, x)| acc + x * &self[(i, j)])
            })
            .collect())
    }

    /// Square-and-multiply power with a non-negative exponent.
    pub fn pow(&self, exponent: &num_bigint::BigUint) -> Result<IntMatrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut result = IntMatrix::identity(self.rows);
        let mut base = self.clone();
        let bits = exponent.bits();
        for bit in 0..bits {
            if exponent.bit(bit) {
                result = mat_mul(&result, &base)?;
            }
            if bit + 1 < bits {
                base = mat_mul(&base, &base)?;
            }
        }
        Ok(result)
    }

    /// Outer product `u · vᵀ`.
    pub fn outer(u: &[BigInt], v: &[BigInt]) -> IntMatrix {
        Self::from_fn(u.len(), v.len(), |i, j| &u[i] * &v[j])
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .cloned()
                .map(BigRational::from_integer)
                .collect(),
        }
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn determinant(&self) -> Result<BigInt, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = num / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        Ok(sign * &m[n - 1][n - 1])
    }

    pub fn rank(&self) -> usize {
        self.to_rational().rank()
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Exact matrix product.
pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    if a.cols != b.rows {
        return Err(a.mismatch(b));
    }
    let mut data = vec![BigInt::zero(); a.rows * b.cols];
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = &a[(i, k)];
            if aik.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                data[i * b.cols + j] += aik * &b[(k, j)];
            }
        }
    }
    Ok(IntMatrix {
        rows: a.rows,
        cols: b.cols,
        data,
    })
}

/// Exact inverse of an integer matrix with determinant ±1.
pub fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    let det = m.determinant()?;
    if det.abs() != BigInt::one() {
        return Err(LinalgError::NotUnimodular { det });
    }
    let n = m.rows;
    let mut aug = RatMatrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            BigRational::from_integer(m[(i, j)].clone())
        } else if j - n == i {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    });
    let pivots = aug.rref_in_place();
    debug_assert_eq!(pivots, (0..n).collect::<Vec<_>>());
    Ok(IntMatrix::from_fn(n, n, |i, j| {
        let e = &aug[(i, n + j)];
        debug_assert!(e.is_integer(), "inverse of a unimodular matrix is integral");
        e.to_integer()
    }))
}

/// Dense rational matrix stored row-major; entries are always reduced.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> BigRational,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| BigRational::zero())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }

    /// Reduces to reduced row echelon form and returns the pivot columns.
    /// The pivot is the first nonzero entry found scanning down a column.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, row * self.cols + j);
                }
            }
            let inv = self[(row, col)].recip();
            for j in col..self.cols {
                let v = &self[(row, j)] * &inv;
                *self.at_mut(row, j) = v;
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let factor = self[(r, col)].clone();
                for j in col..self.cols {
                    let v = &self[(r, j)] - &factor * &self[(row, j)];
                    *self.at_mut(r, j) = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = BigRational;

    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect())
            .collect();
        write!(f, "RatMatrix{rows:?}")
    }
}

/// Basis of the right nullspace of `m`.
///
/// Each basis vector is scaled to a primitive integer vector whose first
/// nonzero entry is positive. The basis is ordered by free column.
pub fn rational_nullspace(m: &RatMatrix) -> Vec<IntVector> {
    let mut r = m.clone();
    let pivots = r.rref_in_place();
    let free = (0..m.cols).filter(|c| !pivots.contains(c));
    free.map(|fc| {
        let mut v = vec![BigRational::zero(); m.cols];
        v[fc] = BigRational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -r[(row, fc)].clone();
        }
        primitive_from_rational(&v)
    })
    .collect()
}

/// Clears denominators and normalizes to a primitive integer vector with
/// first nonzero entry positive. The zero vector maps to itself.
pub fn primitive_from_rational(v: &[BigRational]) -> IntVector {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: IntVector = v
        .iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    primitive_part(&ints)
}

/// Divides by the content and fixes the sign so the first nonzero entry is
/// positive. The zero vector maps to itself.
pub fn primitive_part(v: &[BigInt]) -> IntVector {
    let g = content(v);
    if g.is_zero() {
        return v.to_vec();
    }
    let first_negative = v
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative());
    let g = if first_negative { -g } else { g };
    v.iter().map(|x| x / &g).collect()
}

/// Non-negative gcd of all entries.
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// Linear independence of two vectors, decided by their 2×2 minors.
pub fn independent_pair(u: &[BigInt], v: &[BigInt]) -> bool {
    let n = u.len().min(v.len());
    (0..n).any(|i| (i + 1..n).any(|j| &u[i] * &v[j] != &u[j] * &v[i]))
}

/// Rank of the matrix whose columns are the given vectors.
pub fn rank_of_vectors(vectors: &[&[BigInt]]) -> usize {
    let Some(len) = vectors.first().map(|v| v.len()) else {
        return 0;
    };
    RatMatrix::from_fn(len, vectors.len(), |i, j| {
        BigRational::from_integer(vectors[j][i].clone())
    })
    .rank()
}

pub fn to_big(v: &[i64]) -> IntVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
