//! Rational parameter tuples and the integer polynomials they define.
//!
//! A tuple `(a_1, ..., a_2n)` of rationals in `[0, 1)` stands for the
//! polynomial `∏ (x - e^{2πi a_j})`. When the tuple is closed under the
//! Galois action (every primitive residue modulo a denominator appears with
//! the same multiplicity) that product is `∏_d Φ_d^{m_d}`, which has integer
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A parameter entry; always reduced with a positive denominator.
pub type Rat = Rational64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("malformed rational `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("entry `{0}` is outside [0, 1)")]
    OutOfRange(String),
    #[error("empty parameter tuple")]
    Empty,
    #[error("cyclotomic index must be positive")]
    ZeroCyclotomicIndex,
    #[error("tuple is not Galois-stable at denominator {denominator}: residue {missing_or_uneven}/{denominator} has multiplicity {found}, expected {expected}")]
    NotGaloisStable {
        denominator: i64,
        missing_or_uneven: i64,
        found: usize,
        expected: usize,
    },
}

/// Multiset of rationals in `[0, 1)` defining one factor polynomial.
///
/// Entries keep the order they were written in; equality ignores order.
#[derive(Clone, Debug)]
pub struct ParamTuple {
    entries: Vec<Rat>,
}

impl ParamTuple {
    pub fn new(entries: Vec<Rat>) -> Result<Self, ParamError> {
        if entries.is_empty() {
            return Err(ParamError::Empty);
        }
        for e in &entries {
            if e.is_negative() || *e >= Rat::one() {
                return Err(ParamError::OutOfRange(format_rat(e)));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn sorted(&self) -> Vec<Rat> {
        let mut v = self.entries.clone();
        v.sort();
        v
    }

    /// Multiplicity of every entry, keyed by denominator then numerator.
    fn multiplicities(&self) -> BTreeMap<i64, BTreeMap<i64, usize>> {
        let mut by_den: BTreeMap<i64, BTreeMap<i64, usize>> = BTreeMap::new();
        for e in &self.entries {
            *by_den
                .entry(*e.denom())
                .or_default()
                .entry(*e.numer())
                .or_default() += 1;
        }
        by_den
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.entries.iter().map(format_rat).collect()
    }
}

impl PartialEq for ParamTuple {
    fn eq(&self, other: &Self) -> bool {
        self.sorted() == other.sorted()
    }
}

impl Eq for ParamTuple {}

impl fmt::Display for ParamTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_strings().join(","))
    }
}

impl FromStr for ParamTuple {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational_tuple(s)
    }
}

impl Serialize for ParamTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ParamTuple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let tokens = Vec::<String>::deserialize(deserializer)?;
        let entries = tokens
            .iter()
            .map(|t| parse_rational(t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        ParamTuple::new(entries).map_err(serde::de::Error::custom)
    }
}

/// `p/q` form, with `0` for zero.
pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses one `p/q` or `p` token. Whitespace is ignored.
pub fn parse_rational(token: &str) -> Result<Rat, ParamError> {
    let compact: String = token.chars().filter(|c| !c.is_whitespace()).collect();
    let malformed = || ParamError::Malformed(compact.clone());
    let (num, den) = match compact.split_once('/') {
        Some((p, q)) => (p, q),
        None => (compact.as_str(), "1"),
    };
    let is_int = |s: &str| {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(num) || !den.bytes().all(|b| b.is_ascii_digit()) || den.is_empty() {
        return Err(malformed());
    }
    let p: i64 = num.parse().map_err(|_| malformed())?;
    let q: i64 = den.parse().map_err(|_| malformed())?;
    if q == 0 {
        return Err(ParamError::ZeroDenominator(compact));
    }
    Ok(Rat::new(p, q))
}

/// Parses `p1/q1,p2/q2,...` into a tuple with entries in `[0, 1)`.
///
/// Arity is not checked here; group construction does that.
pub fn parse_rational_tuple(text: &str) -> Result<ParamTuple, ParamError> {
    let entries = text
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()?;
    ParamTuple::new(entries)
}

/// Monic integer polynomial, coefficients lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Strips trailing zeros; the zero polynomial has no coefficients.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `x^d - 1`.
    pub fn x_pow_minus_one(d: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[0] = BigInt::from(-1);
        coeffs[d] = BigInt::one();
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder by a monic divisor.
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.degree();
        if self.coeffs.len() < divisor.coeffs.len() {
            return (Self::new(Vec::new()), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Evaluates at a complex point in floating point.
    pub fn eval_complex(&self, re: f64, im: f64) -> (f64, f64) {
        let to_f = |c: &BigInt| c.to_string().parse::<f64>().unwrap_or(f64::NAN);
        self.coeffs.iter().rev().fold((0.0, 0.0), |(ar, ai), c| {
            (ar * re - ai * im + to_f(c), ar * im + ai * re)
        })
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            let body = match (k, mag.is_one()) {
                (0, _) => mag.to_string(),
                (1, true) => "x".to_string(),
                (1, false) => format!("{mag}x"),
                (_, true) => format!("x^{k}"),
                (_, false) => format!("{mag}x^{k}"),
            };
            terms.push((sign, body));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (sign, body)) in terms.iter().enumerate() {
            match (i, *sign) {
                (0, "+") => write!(f, "{body}")?,
                (0, _) => write!(f, "-{body}")?,
                _ => write!(f, " {sign} {body}")?,
            }
        }
        Ok(())
    }
}

fn divisors(d: u64) -> Vec<u64> {
    (1..=d).filter(|e| d.is_multiple_of(*e)).collect()
}

pub fn euler_phi(d: u64) -> u64 {
    (1..=d).filter(|k| k.gcd(&d) == 1).count() as u64
}

/// The `d`-th cyclotomic polynomial, by exact division of `x^d - 1` by the
/// cyclotomic factors of its proper divisors.
pub fn cyclotomic_poly(d: u64) -> Result<IntPolynomial, ParamError> {
    if d == 0 {
        return Err(ParamError::ZeroCyclotomicIndex);
    }
    let divs = divisors(d);
    let mut table: BTreeMap<u64, IntPolynomial> = BTreeMap::new();
    for &e in &divs {
        let proper = divs
            .iter()
            .filter(|&&k| k < e && e % k == 0)
            .fold(IntPolynomial::one(), |acc, k| acc.mul(&table[k]));
        let (q, r) = IntPolynomial::x_pow_minus_one(e as usize).div_rem_monic(&proper);
        debug_assert!(
            r.coeffs().is_empty(),
            "x^{e} - 1 divisible by proper factors"
        );
        table.insert(e, q);
    }
    Ok(table.remove(&d).expect("d divides itself"))
}

/// `∏_d Φ_d^{m_d}` for a Galois-stable tuple.
pub fn build_char_poly(t: &ParamTuple) -> Result<IntPolynomial, ParamError> {
    let mut poly = IntPolynomial::one();
    for (den, residues) in t.multiplicities() {
        let units: Vec<i64> = (0..den).filter(|k| k.gcd(&den) == 1).collect();
        let expected = residues[&residues.keys().next().copied().expect("nonempty")];
        for k in &units {
            let found = residues.get(k).copied().unwrap_or(0);
            if found != expected {
                return Err(ParamError::NotGaloisStable {
                    denominator: den,
                    missing_or_uneven: *k,
                    found,
                    expected,
                });
            }
        }
        poly = poly.mul(&cyclotomic_poly(den as u64)?.pow(expected));
    }
    Ok(poly)
}

/// True iff no entry of `a` agrees with an entry of `b` modulo 1.
pub fn check_parameter_condition(a: &ParamTuple, b: &ParamTuple) -> bool {
    a.entries().iter().all(|x| !b.entries().contains(x))
}
