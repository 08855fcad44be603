use std::fmt;
use std::str::FromStr;

use super::PipelineError;

pub const HASH_BITS: usize = 96;
pub const HASH_BYTES: usize = HASH_BITS / 8;

/// A 96-bit perceptual hash.
///
/// Bit `i` is stored MSB-first: bit 0 is the most significant bit of byte 0.
/// The same packing is used for hex serialization and as SHA-256 input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryHash([u8; HASH_BYTES]);

impl BinaryHash {
    pub const fn from_bytes(bytes: [u8; HASH_BYTES]) -> Self {
        Self(bytes)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        assert_eq!(bits.len(), HASH_BITS, "a hash has exactly {HASH_BITS} bits");
        let mut bytes = [0u8; HASH_BYTES];
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            bytes[i / 8] |= 0x80 >> (i % 8);
        }
        Self(bytes)
    }

    pub fn bytes(&self) -> &[u8; HASH_BYTES] {
        &self.0
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0[i / 8] & (0x80 >> (i % 8)) != 0
    }

    /// The `{0, 1}` view.
    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..HASH_BITS).map(|i| self.bit(i))
    }

    /// The `{-1, 1}` view, `s_i = 2 b_i - 1`.
    pub fn signed(&self) -> [f64; HASH_BITS] {
        let mut out = [0.0; HASH_BITS];
        for (i, s) in out.iter_mut().enumerate() {
            *s = if self.bit(i) { 1.0 } else { -1.0 };
        }
        out
    }

    pub fn flip(&self, i: usize) -> Self {
        let mut bytes = self.0;
        bytes[i / 8] ^= 0x80 >> (i % 8);
        Self(bytes)
    }

    pub fn complement(&self) -> Self {
        Self(self.0.map(|b| !b))
    }

    pub fn hamming_distance(&self, other: &Self) -> u32 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Fraction of the 96 bit positions at which the hashes agree.
pub fn hamming_similarity(h1: &BinaryHash, h2: &BinaryHash) -> f64 {
    f64::from(HASH_BITS as u32 - h1.hamming_distance(h2)) / HASH_BITS as f64
}

impl fmt::Display for BinaryHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for BinaryHash {
    type Err = PipelineError;

    /// Parses exactly 24 hex digits (either case).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PipelineError::HashFormat(s.to_string());
        if s.len() != 2 * HASH_BYTES || !s.is_ascii() {
            return Err(bad());
        }
        let mut bytes = [0u8; HASH_BYTES];
        for (i, b) in bytes.iter_mut().enumerate() {
            *b = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).map_err(|_| bad())?;
        }
        Ok(Self(bytes))
    }
}
