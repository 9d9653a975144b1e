use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A bit string of at most [`BitString::MAX_LEN`] bits.
///
/// Bits are kept most-significant-first in the low `len` bits of a word, so
/// `"0110"` has value 6. Every textual form (Display, serde) is MSB first.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: u8,
    word: u64,
}

impl BitString {
    pub const MAX_LEN: usize = 64;

    pub const fn empty() -> Self {
        BitString { len: 0, word: 0 }
    }

    pub fn bit(b: bool) -> Self {
        BitString {
            len: 1,
            word: b as u64,
        }
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_value(0, len)
    }

    /// `value` read as a `len`-bit unsigned integer.
    pub fn from_value(value: u64, len: usize) -> Result<Self> {
        if len > Self::MAX_LEN {
            return Err(Error::domain(format!(
                "bit strings are limited to {} bits, got {len}",
                Self::MAX_LEN
            )));
        }
        if len < 64 && value >> len != 0 {
            return Err(Error::domain(format!(
                "value {value} does not fit in {len} bits"
            )));
        }
        Ok(BitString {
            len: len as u8,
            word: value,
        })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.len() > Self::MAX_LEN {
            return Err(Error::domain(format!(
                "bit strings are limited to {} bits, got {}",
                Self::MAX_LEN,
                bits.len()
            )));
        }
        let word = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Ok(BitString {
            len: bits.len() as u8,
            word,
        })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> u64 {
        self.word
    }

    /// Bit `i`, counting from the most significant end.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len(), "bit index {i} out of range for length {}", self.len);
        (self.word >> (self.len() - 1 - i)) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    /// Right-pads with zeros up to `len` bits. Shorter targets are an error.
    pub fn pad_to(&self, len: usize) -> Result<Self> {
        if len < self.len() || len > Self::MAX_LEN {
            return Err(Error::domain(format!(
                "cannot pad a {}-bit string to {len} bits",
                self.len
            )));
        }
        let shift = len - self.len();
        let word = if shift >= 64 { 0 } else { self.word << shift };
        Ok(BitString {
            len: len as u8,
            word,
        })
    }

    /// The first `len` bits.
    pub fn prefix(&self, len: usize) -> Self {
        assert!(len <= self.len(), "prefix longer than string");
        let shift = self.len() - len;
        let word = if shift >= 64 { 0 } else { self.word >> shift };
        BitString {
            len: len as u8,
            word,
        }
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len <= other.len && other.prefix(self.len()) == *self
    }

    /// XOR after right-padding the shorter operand with zeros.
    pub fn xor_padded(&self, other: &BitString) -> Self {
        let len = self.len().max(other.len());
        let a = self.pad_to(len).expect("len within bounds");
        let b = other.pad_to(len).expect("len within bounds");
        BitString {
            len: len as u8,
            word: a.word ^ b.word,
        }
    }

    pub fn concat(&self, other: &BitString) -> Result<Self> {
        let len = self.len() + other.len();
        if len > Self::MAX_LEN {
            return Err(Error::domain(format!("concatenation exceeds {} bits", Self::MAX_LEN)));
        }
        let word = if other.len() >= 64 {
            other.word
        } else {
            (self.word << other.len()) | other.word
        };
        Ok(BitString {
            len: len as u8,
            word,
        })
    }

    pub fn count_ones(&self) -> u32 {
        self.word.count_ones()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ε");
        }
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "ε" {
            return Ok(BitString::empty());
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::domain(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        BitString::from_bits(&bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let s: String = self.bits().map(|b| if b { '1' } else { '0' }).collect();
        serializer.serialize_str(&s)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s.is_empty() {
            return Ok(BitString::empty());
        }
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn msb_first_text() {
        let b = BitString::from_value(6, 4).unwrap();
        assert_eq!(b.to_string(), "0110");
        assert!(!b.get(0));
        assert!(b.get(1));
        assert_eq!("0110".parse::<BitString>().unwrap(), b);
    }

    #[test]
    fn rejects_overflow() {
        assert!(BitString::from_value(4, 2).is_err());
        assert!(BitString::zeros(65).is_err());
    }

    #[test]
    fn padding_is_on_the_right() {
        let b: BitString = "1".parse().unwrap();
        assert_eq!(b.pad_to(3).unwrap().to_string(), "100");
        let x = b.xor_padded(&"011".parse().unwrap());
        assert_eq!(x.to_string(), "111");
    }

    #[test]
    fn prefixes() {
        let a: BitString = "0".parse().unwrap();
        let b: BitString = "01".parse().unwrap();
        assert!(a.is_prefix_of(&b));
        assert!(!b.is_prefix_of(&a));
        assert!(BitString::empty().is_prefix_of(&a));
    }

    proptest! {
        #[test]
        fn xor_removal_recovers_padded_member(a in 0u64..256, la in 0usize..9, b in 0u64..256, lb in 0usize..9) {
            let a = BitString::from_value(a & ((1 << la) - 1), la).unwrap();
            let b = BitString::from_value(b & ((1 << lb) - 1), lb).unwrap();
            let block = a.xor_padded(&b);
            let back = block.xor_padded(&b);
            prop_assert_eq!(back.prefix(a.len()), a);
            prop_assert_eq!(back, a.pad_to(block.len()).unwrap());
        }

        #[test]
        fn text_roundtrip(v in any::<u64>(), len in 0usize..=64) {
            let v = if len == 64 { v } else { v & ((1u64 << len) - 1) };
            let b = BitString::from_value(v, len).unwrap();
            let s = serde_json::to_string(&b).unwrap();
            prop_assert_eq!(serde_json::from_str::<BitString>(&s).unwrap(), b);
        }
    }
}
