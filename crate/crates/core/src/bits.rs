//! Fixed-length bitstrings for responses and device IDs.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A bitstring. Bit 0 is the first sampled bit and becomes the most
/// significant digit of the hex encoding. Ordering is lexicographic
/// over the bits with 0 < 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new() -> Self {
        Bits(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        Bits(Vec::with_capacity(n))
    }

    /// All-zero bitstring of length `n`.
    pub fn zeros(n: usize) -> Self {
        Bits(vec![false; n])
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Bits {
        Bits(self.0.iter().map(|b| !b).collect())
    }

    /// Concatenation of `parts` in order.
    pub fn concat<'a, I: IntoIterator<Item = &'a Bits>>(parts: I) -> Bits {
        let mut out = Vec::new();
        for p in parts {
            out.extend_from_slice(&p.0);
        }
        Bits(out)
    }

    /// Hex encoding, most-significant-bit-first: bit 0 is the MSB of the
    /// first digit. A final partial nibble is padded with zeros on the
    /// low side.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.0.len().div_ceil(4));
        for chunk in self.0.chunks(4) {
            let mut v = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    v |= 8 >> i;
                }
            }
            s.push(char::from_digit(v as u32, 16).unwrap());
        }
        s
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

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bits> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!(
                    "invalid bit character {other:?} in bitstring"
                ))),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_display_parse() {
        let b: Bits = "0110101".parse().unwrap();
        assert_eq!(b.to_string(), "0110101");
        assert_eq!(b.len(), 7);
        assert_eq!(b.count_ones(), 4);
    }

    #[test]
    fn rejects_non_binary() {
        assert!("01x1".parse::<Bits>().is_err());
    }

    #[test]
    fn hex_is_msb_first() {
        let b: Bits = "10000001".parse().unwrap();
        assert_eq!(b.to_hex(), "81");
        // partial nibble padded low
        let b: Bits = "101".parse().unwrap();
        assert_eq!(b.to_hex(), "a");
        let b: Bits = "111100001".parse().unwrap();
        assert_eq!(b.to_hex(), "f08");
    }

    #[test]
    fn ordering_is_lexicographic() {
        let a: Bits = "0011".parse().unwrap();
        let b: Bits = "0100".parse().unwrap();
        assert!(a < b);
    }

    #[test]
    fn concat_and_complement() {
        let a: Bits = "01".parse().unwrap();
        let b: Bits = "10".parse().unwrap();
        assert_eq!(Bits::concat([&a, &b]).to_string(), "0110");
        assert_eq!(a.complement().to_string(), "10");
    }
}
