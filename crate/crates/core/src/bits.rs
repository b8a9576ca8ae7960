use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::HmpError;

/// A bit string. Position 0 is the first (most significant) character.
///
/// Serialized as a string of `0`/`1` characters.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Bits(vec![false; len])
    }

    /// Big-endian encoding of `value` in exactly `len` bits.
    pub fn from_u64(value: u64, len: usize) -> Self {
        debug_assert!(len >= 64 || value >> len == 0);
        Bits(
            (0..len)
                .map(|i| (value >> (len - 1 - i)) & 1 == 1)
                .collect(),
        )
    }

    /// Big-endian value. Panics past 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.0.len() <= 64, "bit string too long for u64");
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bit at 0-based position `i`.
    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Bits>) -> Bits {
        Bits(
            parts
                .into_iter()
                .flat_map(|b| b.0.iter().copied())
                .collect(),
        )
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        assert_eq!(self.len(), other.len());
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }

    /// Sub-string `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Bits {
        Bits(self.0[start..start + len].to_vec())
    }

    /// Every bit string of length `len`, in increasing numeric order.
    pub fn all(len: usize) -> impl Iterator<Item = Bits> {
        assert!(len < 64);
        (0..1u64 << len).map(move |v| Bits::from_u64(v, len))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits(\"{self}\")")
    }
}

impl FromStr for Bits {
    type Err = HmpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(HmpError::invalid(format!("not a bit: {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Bits)
    }
}

impl From<Vec<bool>> for Bits {
    fn from(v: Vec<bool>) -> Self {
        Bits(v)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
