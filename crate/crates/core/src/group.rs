//! Hypergeometric groups: companion-matrix generators, words in the
//! generators, and the transvection `T = A⁻¹B`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{self, primitive_part, IntMatrix, IntVector, LinalgError};
use crate::params::{
    build_char_poly, check_parameter_condition, IntPolynomial, ParamError, ParamTuple,
};

/// Longest word the parser will expand.
pub const MAX_WORD_LEN: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("parameter tuples have different lengths ({alpha} vs {beta})")]
    ArityMismatch { alpha: usize, beta: usize },
    #[error("parameter tuples must have even length at least 4, got {0}")]
    BadArity(usize),
    #[error("parameter condition violated: alpha and beta share an entry modulo 1")]
    ParameterCondition,
    #[error("polynomial is not monic or has degree below 2")]
    NotCompanionable,
    #[error("matrix is not a transvection: rank(X - 1) = {rank}")]
    NotTransvection { rank: usize },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown symbol `{symbol}` at position {pos}")]
    UnknownSymbol { symbol: char, pos: usize },
    #[error("unbalanced parentheses at position {pos}")]
    Unbalanced { pos: usize },
    #[error("empty group at position {pos}")]
    EmptyGroup { pos: usize },
    #[error("malformed exponent at position {pos}")]
    MalformedExponent { pos: usize },
    #[error("word expands to more than {MAX_WORD_LEN} letters")]
    TooLong,
}

/// One of the four generators `A, A⁻¹, B, B⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    /// The fixed generator order used by searches.
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    fn base(self) -> char {
        match self {
            Letter::A | Letter::AInv => 'A',
            Letter::B | Letter::BInv => 'B',
        }
    }

    fn is_inverse(self) -> bool {
        matches!(self, Letter::AInv | Letter::BInv)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inverse() {
            write!(f, "{}^{{-1}}", self.base())
        } else {
            write!(f, "{}", self.base())
        }
    }
}

/// Fully expanded word in the generators. Not freely reduced.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Maximal runs of a repeated letter, as `(letter, run length)`.
    pub fn runs(&self) -> Vec<(Letter, usize)> {
        let mut runs: Vec<(Letter, usize)> = Vec::new();
        for &l in &self.0 {
            match runs.last_mut() {
                Some((last, count)) if *last == l => *count += 1,
                _ => runs.push((l, 1)),
            }
        }
        runs
    }
}

impl fmt::Display for Word {
    /// Writes the word in the parser's grammar, compressing runs into powers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (letter, count) in self.runs() {
            match (letter.is_inverse(), count) {
                (false, 1) => write!(f, "{}", letter.base())?,
                (false, k) => write!(f, "{}^{}", letter.base(), k)?,
                (true, k) => write!(f, "{}^{{-{}}}", letter.base(), k)?,
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_word(s)
    }
}

/// Parses the word grammar:
///
/// ```text
/// word  := item*
/// item  := atom power?
/// atom  := 'A' | 'B' | '(' item+ ')'
/// power := '^' ( '-'? digits | '{' '-'? digits '}' )
/// ```
///
/// Whitespace is ignored. A negative power of a group is the inverse of the
/// group repeated, so `(BA)^{-2}` is `A⁻¹B⁻¹A⁻¹B⁻¹`.
pub fn parse_word(text: &str) -> Result<Word, WordError> {
    let chars: Vec<(usize, char)> = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    let mut parser = WordParser {
        chars: &chars,
        pos: 0,
        end: text.len(),
    };
    let letters = parser.sequence()?;
    if let Some(&(p, _)) = parser.chars.get(parser.pos) {
        return Err(WordError::Unbalanced { pos: p });
    }
    Ok(Word(letters))
}

struct WordParser<'a> {
    chars: &'a [(usize, char)],
    pos: usize,
    end: usize,
}

impl WordParser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.end, |&(p, _)| p)
    }

    fn sequence(&mut self) -> Result<Vec<Letter>, WordError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if c == ')' {
                break;
            }
            let item = self.item()?;
            if out.len() + item.len() > MAX_WORD_LEN {
                return Err(WordError::TooLong);
            }
            out.extend(item);
        }
        Ok(out)
    }

    fn item(&mut self) -> Result<Vec<Letter>, WordError> {
        let start = self.offset();
        let atom = match self.peek() {
            Some('A') => {
                self.pos += 1;
                vec![Letter::A]
            }
            Some('B') => {
                self.pos += 1;
                vec![Letter::B]
            }
            Some('(') => {
                self.pos += 1;
                if self.peek() == Some(')') {
                    return Err(WordError::EmptyGroup { pos: start });
                }
                let inner = self.sequence()?;
                if self.peek() != Some(')') {
                    return Err(WordError::Unbalanced { pos: start });
                }
                self.pos += 1;
                inner
            }
            Some(symbol) => {
                return Err(WordError::UnknownSymbol { symbol, pos: start });
            }
            None => unreachable!("item called at end of input"),
        };
        if self.peek() != Some('^') {
            return Ok(atom);
        }
        self.pos += 1;
        let exponent = self.exponent()?;
        let magnitude = usize::try_from(exponent.unsigned_abs()).map_err(|_| WordError::TooLong)?;
        if atom.len().saturating_mul(magnitude) > MAX_WORD_LEN {
            return Err(WordError::TooLong);
        }
        let unit = if exponent < 0 {
            Word(atom).inverse().0
        } else {
            atom
        };
        Ok(unit.repeat(magnitude))
    }

    fn exponent(&mut self) -> Result<i64, WordError> {
        let start = self.offset();
        let malformed = WordError::MalformedExponent { pos: start };
        let braced = self.peek() == Some('{');
        if braced {
            self.pos += 1;
        }
        let negative = self.peek() == Some('-');
        if negative {
            self.pos += 1;
        }
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.pos += 1;
        }
        if digits.is_empty() {
            return Err(malformed);
        }
        if braced {
            if self.peek() != Some('}') {
                return Err(malformed);
            }
            self.pos += 1;
        }
        let value: i64 = digits.parse().map_err(|_| WordError::TooLong)?;
        Ok(if negative { -value } else { value })
    }
}

/// The companion matrix: ones on the subdiagonal and the negated
/// coefficients (constant term on top) in the last column.
pub fn companion_matrix(p: &IntPolynomial) -> Result<IntMatrix, GroupError> {
    if !p.is_monic() || p.degree() < 2 {
        return Err(GroupError::NotCompanionable);
    }
    let n = p.degree();
    let coeffs = p.coeffs();
    Ok(IntMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -coeffs[i].clone()
        } else if i == j + 1 {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    }))
}

/// Generator matrices `A, B` together with their exact inverses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generators {
    a: IntMatrix,
    b: IntMatrix,
    a_inv: IntMatrix,
    b_inv: IntMatrix,
}

impl Generators {
    pub fn new(a: IntMatrix, b: IntMatrix) -> Result<Self, GroupError> {
        if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
            return Err(LinalgError::DimensionMismatch {
                left_rows: a.rows(),
                left_cols: a.cols(),
                right_rows: b.rows(),
                right_cols: b.cols(),
            }
            .into());
        }
        let a_inv = linalg::unimodular_inverse(&a)?;
        let b_inv = linalg::unimodular_inverse(&b)?;
        Ok(Self { a, b, a_inv, b_inv })
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn matrix(&self, letter: Letter) -> &IntMatrix {
        match letter {
            Letter::A => &self.a,
            Letter::AInv => &self.a_inv,
            Letter::B => &self.b,
            Letter::BInv => &self.b_inv,
        }
    }

    /// `(P A P⁻¹, P B P⁻¹)` for a unimodular `P`.
    pub fn conjugate(&self, p: &IntMatrix) -> Result<Self, GroupError> {
        let p_inv = linalg::unimodular_inverse(p)?;
        let conj = |m: &IntMatrix| -> Result<IntMatrix, LinalgError> { p.mul(m)?.mul(&p_inv) };
        Ok(Self {
            a: conj(&self.a)?,
            b: conj(&self.b)?,
            a_inv: conj(&self.a_inv)?,
            b_inv: conj(&self.b_inv)?,
        })
    }

    /// Factors `T = A⁻¹B`.
    pub fn transvection(&self) -> Result<Transvection, GroupError> {
        transvection_factor(&self.a_inv.mul(&self.b)?)
    }
}

/// A hypergeometric group given by its parameters and generators.
#[derive(Debug, Clone)]
pub struct GroupPresentation {
    /// Half the matrix size: the group sits in `Sp(2n)`.
    pub n: usize,
    pub alpha: ParamTuple,
    pub beta: ParamTuple,
    pub f: IntPolynomial,
    pub g: IntPolynomial,
    pub gens: Generators,
}

/// Builds `A` and `B` as the companion matrices of the polynomials of
/// `alpha` and `beta`.
pub fn build_group(alpha: &ParamTuple, beta: &ParamTuple) -> Result<GroupPresentation, GroupError> {
    if alpha.len() != beta.len() {
        return Err(GroupError::ArityMismatch {
            alpha: alpha.len(),
            beta: beta.len(),
        });
    }
    if !alpha.len().is_multiple_of(2) || alpha.len() < 4 {
        return Err(GroupError::BadArity(alpha.len()));
    }
    if !check_parameter_condition(alpha, beta) {
        return Err(GroupError::ParameterCondition);
    }
    let f = build_char_poly(alpha)?;
    let g = build_char_poly(beta)?;
    let gens = Generators::new(companion_matrix(&f)?, companion_matrix(&g)?)?;
    Ok(GroupPresentation {
        n: alpha.len() / 2,
        alpha: alpha.clone(),
        beta: beta.clone(),
        f,
        g,
        gens,
    })
}

/// Exact product of the word's generator matrices, left to right.
///
/// Runs of a repeated letter are evaluated as cached matrix powers.
pub fn eval_word(w: &Word, gens: &Generators) -> IntMatrix {
    let mut cache: HashMap<(Letter, usize), IntMatrix> = HashMap::new();
    let mut acc = IntMatrix::identity(gens.dim());
    for (letter, count) in w.runs() {
        let power = cache.entry((letter, count)).or_insert_with(|| {
            gens.matrix(letter)
                .pow(&BigUint::from(count))
                .expect("generators are square")
        });
        acc = acc.mul(power).expect("generators share a dimension");
    }
    acc
}

/// A transvection `X = 1 + v_R · v_L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transvection {
    pub matrix: IntMatrix,
    /// Primitive direction, first nonzero entry positive.
    pub v_r: IntVector,
    pub v_l: IntVector,
    /// `v_L = λ · v_Rᵀ Ω`, filled in once the invariant form is known.
    pub lambda: Option<BigRational>,
}

/// Splits `X - 1` into a primitive column `v_R` and an integer row `v_L`.
pub fn transvection_factor(x: &IntMatrix) -> Result<Transvection, GroupError> {
    if !x.is_square() {
        return Err(LinalgError::NotSquare {
            rows: x.rows(),
            cols: x.cols(),
        }
        .into());
    }
    let n = x.rows();
    let d = x.sub(&IntMatrix::identity(n))?;
    let not_transvection = || GroupError::NotTransvection { rank: d.rank() };
    let Some(first) = (0..n).find(|&j| (0..n).any(|i| !d[(i, j)].is_zero())) else {
        return Err(not_transvection());
    };
    let v_r = primitive_part(&d.column(first));
    let pivot = v_r
        .iter()
        .position(|e| !e.is_zero())
        .expect("nonzero column");
    let mut v_l = Vec::with_capacity(n);
    for j in 0..n {
        // v_R is primitive, so an integral column proportional to it is an
        // integer multiple of it.
        let t = &d[(pivot, j)] / &v_r[pivot];
        if (0..n).any(|i| d[(i, j)] != &t * &v_r[i]) {
            return Err(not_transvection());
        }
        v_l.push(t);
    }
    Ok(Transvection {
        matrix: x.clone(),
        v_r,
        v_l,
        lambda: None,
    })
}
