//! Bit sequences and the packing conventions used for output files.
//!
//! Everything here is MSB-first: bit `i` of a stream lands in byte `i / 8` at
//! position `7 - i % 8`, and word `k` of [`pack_words`] holds bits
//! `32k .. 32k + 32` with the earliest bit in the most significant position.

use std::fmt;

use crate::error::{Error, Result};

/// An append-only sequence of bits, stored packed.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitStream {
    bytes: Vec<u8>,
    len: usize,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitStream {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let off = self.len % 8;
        if off == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> off;
        }
        self.len += 1;
    }

    /// Append the low `count` bits of `value`, most significant first.
    pub fn push_word(&mut self, value: u64, count: u32) {
        debug_assert!(count <= 64);
        for i in (0..count).rev() {
            self.push((value >> i) & 1 == 1);
        }
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.bytes[i / 8] & (0x80 >> (i % 8)) != 0)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bytes[i / 8] & (0x80 >> (i % 8)) != 0)
    }

    pub fn count_ones(&self) -> usize {
        // padding bits are always zero
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn extend_from(&mut self, other: &BitStream) {
        if self.len % 8 == 0 {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
        } else {
            for bit in other.iter() {
                self.push(bit);
            }
        }
    }

    /// Bits `start..` as a new stream.
    pub fn skip(&self, start: usize) -> BitStream {
        let mut out = BitStream::with_capacity(self.len.saturating_sub(start));
        for bit in self.iter().skip(start) {
            out.push(bit);
        }
        out
    }

    pub fn complement(&self) -> BitStream {
        let mut out = BitStream {
            bytes: self.bytes.iter().map(|b| !b).collect(),
            len: self.len,
        };
        out.clear_padding();
        out
    }

    fn clear_padding(&mut self) {
        let used = self.len % 8;
        if used != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= 0xffu8 << (8 - used);
            }
        }
    }

    /// Packed bytes, MSB-first; a trailing partial byte is zero-padded.
    pub fn as_packed_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn from_packed_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if len > bytes.len() * 8 {
            return Err(Error::InvalidParameter(format!(
                "{len} bits requested from {} bytes",
                bytes.len()
            )));
        }
        let mut s = BitStream {
            bytes: bytes[..len.div_ceil(8)].to_vec(),
            len,
        };
        s.clear_padding();
        Ok(s)
    }

    pub fn to_ascii(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Parses `'0'`/`'1'` characters, ignoring ASCII whitespace.
    pub fn from_ascii(text: &str) -> Result<Self> {
        let mut s = BitStream::with_capacity(text.len());
        for ch in text.chars() {
            match ch {
                '0' => s.push(false),
                '1' => s.push(true),
                c if c.is_ascii_whitespace() => {}
                c => return Err(Error::Parse(format!("unexpected character {c:?} in bit text"))),
            }
        }
        Ok(s)
    }

    pub fn from_words(words: &[u32]) -> Self {
        let mut s = BitStream::with_capacity(words.len() * 32);
        for &w in words {
            s.push_word(u64::from(w), 32);
        }
        s
    }
}

impl fmt::Debug for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitStream({:?})", self.to_ascii())
        } else {
            write!(f, "BitStream(len = {})", self.len)
        }
    }
}

impl FromIterator<bool> for BitStream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut s = BitStream::new();
        for b in iter {
            s.push(b);
        }
        s
    }
}

/// Result of [`pack_words`]; `dropped_bits` counts the trailing remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedWords {
    pub words: Vec<u32>,
    pub dropped_bits: usize,
}

/// Split into non-overlapping 32-bit words, first bit as MSB.
pub fn pack_words(s: &BitStream) -> PackedWords {
    let n = s.len() / 32;
    let bytes = s.as_packed_bytes();
    let words = (0..n)
        .map(|k| u32::from_be_bytes(bytes[4 * k..4 * k + 4].try_into().unwrap()))
        .collect();
    PackedWords {
        words,
        dropped_bits: s.len() % 32,
    }
}

pub fn words_to_le_bytes(words: &[u32]) -> Vec<u8> {
    words.iter().flat_map(|w| w.to_le_bytes()).collect()
}

/// Trailing bytes that do not fill a word are an error.
pub fn words_from_le_bytes(bytes: &[u8]) -> Result<Vec<u32>> {
    if bytes.len() % 4 != 0 {
        return Err(Error::Parse(format!(
            "word stream length {} is not a multiple of 4",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pack_examples() {
        let ones = BitStream::from_ascii(&"1".repeat(32)).unwrap();
        assert_eq!(pack_words(&ones).words, vec![4294967295]);

        let lsb = BitStream::from_ascii(&format!("{}1", "0".repeat(31))).unwrap();
        assert_eq!(pack_words(&lsb).words, vec![1]);

        let prefix = BitStream::from_ascii(&format!("10101110{}", "0".repeat(24))).unwrap();
        assert_eq!(pack_words(&prefix).words, vec![0xAE00_0000]);
    }

    #[test]
    fn remainder_is_dropped_and_counted() {
        let s = BitStream::from_ascii(&"1".repeat(40)).unwrap();
        let p = pack_words(&s);
        assert_eq!(p.words.len(), 1);
        assert_eq!(p.dropped_bits, 8);
    }

    #[test]
    fn complement_keeps_padding_clear() {
        let s = BitStream::from_ascii("101").unwrap();
        let c = s.complement();
        assert_eq!(c.to_ascii(), "010");
        assert_eq!(c.as_packed_bytes(), &[0b0100_0000]);
        assert_eq!(c.count_ones(), 1);
    }

    #[test]
    fn rejects_garbage_text() {
        assert!(BitStream::from_ascii("10x1").is_err());
        assert_eq!(BitStream::from_ascii("10 1\n1").unwrap().len(), 4);
    }

    #[test]
    fn le_words_need_whole_words() {
        assert!(words_from_le_bytes(&[1, 2, 3]).is_err());
        assert_eq!(words_from_le_bytes(&[1, 0, 0, 0]).unwrap(), vec![1]);
    }

    proptest! {
        #[test]
        fn words_and_bits_agree(words in prop::collection::vec(any::<u32>(), 0..64)) {
            let s = BitStream::from_words(&words);
            prop_assert_eq!(s.len(), words.len() * 32);
            let packed = pack_words(&s);
            prop_assert_eq!(&packed.words, &words);
            prop_assert_eq!(words_from_le_bytes(&words_to_le_bytes(&words)).unwrap(), words);
        }

        #[test]
        fn extend_matches_push(a in prop::collection::vec(any::<bool>(), 0..50),
                               b in prop::collection::vec(any::<bool>(), 0..50)) {
            let mut s: BitStream = a.iter().copied().collect();
            s.extend_from(&b.iter().copied().collect());
            let all: Vec<bool> = a.iter().chain(b.iter()).copied().collect();
            prop_assert_eq!(s.iter().collect::<Vec<_>>(), all);
        }
    }
}
