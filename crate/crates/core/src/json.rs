//! Serde helpers writing big integers as JSON numbers.
//!
//! Values that fit in 128 bits become plain numbers; anything larger falls
//! back to a decimal string.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::linalg::IntMatrix;

struct Num<'a>(&'a BigInt);

impl Serialize for Num<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => match self.0.to_i128() {
                Some(v) => s.serialize_i128(v),
                None => s.serialize_str(&self.0.to_string()),
            },
        }
    }
}

struct Row<'a>(&'a [BigInt]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for x in self.0 {
            seq.serialize_element(&Num(x))?;
        }
        seq.end()
    }
}

pub fn int<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    Num(x).serialize(s)
}

pub fn vector<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    Row(v).serialize(s)
}

pub fn matrix<S: Serializer>(m: &IntMatrix, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(m.rows()))?;
    for i in 0..m.rows() {
        seq.serialize_element(&Row(m.row(i)))?;
    }
    seq.end()
}

pub fn vectors<S: Serializer>(vs: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(vs.len()))?;
    for v in vs {
        seq.serialize_element(&Row(v))?;
    }
    seq.end()
}
