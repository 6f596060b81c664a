//! Fixed-length bit assignments over link variables.
//!
//! Position 0 is the leftmost printed character and the most significant bit
//! of the basis index, so `"111010"` names the same basis state everywhere.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn new(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Bitstring(vec![false; len])
    }

    /// Decodes a basis index of an `len`-bit register.
    pub fn from_index(index: usize, len: usize) -> Self {
        Bitstring(
            (0..len)
                .map(|q| (index >> (len - 1 - q)) & 1 == 1)
                .collect(),
        )
    }

    /// Basis index with bit 0 as the most significant position.
    pub fn index(&self) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, pos: usize) -> bool {
        self.0[pos]
    }

    pub fn set(&mut self, pos: usize, value: bool) {
        self.0[pos] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn expect_len(&self, expected: usize) -> Result<()> {
        if self.len() == expected {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected,
                got: self.len(),
            })
        }
    }

    /// Every assignment of `len` bits in basis-index order.
    pub fn all(len: usize) -> impl Iterator<Item = Bitstring> {
        (0..1usize << len).map(move |i| Bitstring::from_index(i, len))
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBitstring(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bitstring)
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
