//! Finite binary strings of up/down ticks.
//!
//! A tick is `1` (up, heads, `H`) or `0` (down, tails, `T`). Bits are stored
//! in path order: index 0 is the first tick.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn new() -> Self {
        BitString { bits: Vec::new() }
    }

    /// Builds a string from 0/1 values. Any other value is rejected.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidInput(format!(
                "bit {} at position {pos} is not 0 or 1",
                bits[pos]
            )));
        }
        Ok(BitString { bits })
    }

    /// The `len` low bits of `value`, most significant first. This is the
    /// natural node index of a binary tree level.
    pub fn from_index(value: u64, len: usize) -> Self {
        assert!(len <= 64, "index strings are limited to 64 bits");
        let bits = (0..len)
            .map(|i| ((value >> (len - 1 - i)) & 1) as u8)
            .collect();
        BitString { bits }
    }

    /// Inverse of [`BitString::from_index`].
    pub fn to_index(&self) -> u64 {
        assert!(self.len() <= 64, "index strings are limited to 64 bits");
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// `symbol` repeated `count` times.
    pub fn repeat(symbol: u8, count: usize) -> Self {
        assert!(symbol <= 1);
        BitString {
            bits: vec![symbol; count],
        }
    }

    /// Parses `0`/`1` or `H`/`T` (either case). H maps to 1 and T to 0.
    /// Mixing the two alphabets is rejected.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut bits = Vec::with_capacity(s.len());
        let mut binary = false;
        let mut coins = false;
        for (i, c) in s.chars().enumerate() {
            let b = match c {
                '0' => {
                    binary = true;
                    0
                }
                '1' => {
                    binary = true;
                    1
                }
                'T' | 't' => {
                    coins = true;
                    0
                }
                'H' | 'h' => {
                    coins = true;
                    1
                }
                other => {
                    return Err(Error::InvalidInput(format!(
                        "character {other:?} at position {i} is not a tick (0/1 or H/T)"
                    )))
                }
            };
            bits.push(b);
        }
        if binary && coins {
            return Err(Error::InvalidInput(
                "string mixes 0/1 and H/T symbols".to_string(),
            ));
        }
        Ok(BitString { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn push(&mut self, bit: u8) {
        assert!(bit <= 1);
        self.bits.push(bit);
    }

    pub fn prefix(&self, len: usize) -> BitString {
        BitString {
            bits: self.bits[..len].to_vec(),
        }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn reversed(&self) -> BitString {
        BitString {
            bits: self.bits.iter().rev().copied().collect(),
        }
    }

    pub fn complemented(&self) -> BitString {
        BitString {
            bits: self.bits.iter().map(|b| b ^ 1).collect(),
        }
    }

    /// Copy with position `i` flipped.
    pub fn flipped(&self, i: usize) -> BitString {
        let mut bits = self.bits.clone();
        bits[i] ^= 1;
        BitString { bits }
    }

    /// The lexicographically least of the string, its reverse, its
    /// complement, and its reversed complement.
    pub fn canonical(&self) -> BitString {
        let r = self.reversed();
        let c = self.complemented();
        let rc = r.complemented();
        [r, c, rc]
            .into_iter()
            .fold(self.clone(), |best, s| if s < best { s } else { best })
    }

    /// Number of distinct strings among the four symmetric images.
    pub fn orbit_size(&self) -> usize {
        let mut images = vec![
            self.clone(),
            self.reversed(),
            self.complemented(),
            self.reversed().complemented(),
        ];
        images.sort();
        images.dedup();
        images.len()
    }

    pub fn hamming_distance(&self, other: &BitString) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        Some(
            self.bits
                .iter()
                .zip(&other.bits)
                .filter(|(a, b)| a != b)
                .count(),
        )
    }

    /// Renders with `H`/`T` instead of `1`/`0`.
    pub fn to_coins(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b == 1 { 'H' } else { 'T' })
            .collect()
    }

    /// All strings of length `n`, in index order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = BitString> {
        assert!(n < 64);
        (0..1u64 << n).map(move |i| BitString::from_index(i, n))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BitString::parse(s)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        BitString::parse(&s).map_err(serde::de::Error::custom)
    }
}
