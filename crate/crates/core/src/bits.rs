//! Bit strings with hex-packed serialization.

use std::fmt;
use std::ops::{BitXor, Index};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An owned string of bits, one `bool` per position.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new() -> Self {
        Bits(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        Bits(vec![false; len])
    }

    pub fn with_capacity(cap: usize) -> Self {
        Bits(Vec::with_capacity(cap))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        self.0[i] = bit;
    }

    /// Selects the bits at `indices`.
    pub fn select(&self, indices: &[usize]) -> Bits {
        indices.iter().map(|&i| self.0[i]).collect()
    }

    /// Packs into little-endian `u64` words: bit `i` is bit `i % 64` of word `i / 64`.
    pub fn to_words(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.len().div_ceil(64)];
        for (i, &b) in self.0.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        words
    }

    /// Hex encoding, MSB-first within each byte, zero-padded at the end.
    pub fn to_hex(&self) -> String {
        let bytes: Vec<u8> = self
            .0
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (j, &b)| acc | ((b as u8) << (7 - j)))
            })
            .collect();
        hex::encode(bytes)
    }

    pub fn from_hex(hex_str: &str, len: usize) -> Result<Bits, hex::FromHexError> {
        let bytes = hex::decode(hex_str)?;
        if bytes.len() != len.div_ceil(8) {
            return Err(hex::FromHexError::InvalidStringLength);
        }
        Ok((0..len)
            .map(|i| bytes[i / 8] >> (7 - i % 8) & 1 == 1)
            .collect())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits[{}; ", self.len())?;
        for b in self.iter().take(64) {
            f.write_str(if b { "1" } else { "0" })?;
        }
        if self.len() > 64 {
            f.write_str("...")?;
        }
        f.write_str("]")
    }
}

impl Index<usize> for Bits {
    type Output = bool;

    fn index(&self, i: usize) -> &bool {
        &self.0[i]
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Bits(iter.into_iter().collect())
    }
}

impl From<Vec<bool>> for Bits {
    fn from(v: Vec<bool>) -> Self {
        Bits(v)
    }
}

impl BitXor for &Bits {
    type Output = Bits;

    fn bitxor(self, rhs: &Bits) -> Bits {
        assert_eq!(
            self.len(),
            rhs.len(),
            "xor of bit strings of unequal length"
        );
        self.iter().zip(rhs.iter()).map(|(a, b)| a ^ b).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct Packed {
    len: usize,
    hex: String,
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        Packed {
            len: self.len(),
            hex: self.to_hex(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let packed = Packed::deserialize(deserializer)?;
        Bits::from_hex(&packed.hex, packed.len).map_err(D::Error::custom)
    }
}
