//! Packed boolean vectors and the word-level kernels shared by the analysers.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Word = u64;
pub const WORD_BITS: usize = Word::BITS as usize;

#[inline]
pub fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// `dst |= src`
#[inline]
pub fn or_assign(dst: &mut [Word], src: &[Word]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= *s;
    }
}

/// `dst &= src`
#[inline]
pub fn and_assign(dst: &mut [Word], src: &[Word]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d &= *s;
    }
}

/// `dst = a & !b`
#[inline]
pub fn and_not_into(dst: &mut [Word], a: &[Word], b: &[Word]) {
    for ((d, x), y) in dst.iter_mut().zip(a).zip(b) {
        *d = *x & !*y;
    }
}

#[inline]
pub fn is_zero(words: &[Word]) -> bool {
    words.iter().all(|&w| w == 0)
}

/// True when every set bit of `u` is also set in `v`.
#[inline]
pub fn is_covered(u: &[Word], v: &[Word]) -> bool {
    u.iter().zip(v).all(|(&a, &b)| a & !b == 0)
}

#[inline]
pub fn popcount(words: &[Word]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// A fixed-length vector of bits. Bit `i` is row `i` of a codeword; unused high
/// bits of the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<Word>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector {
            len,
            words: vec![Word::MAX; words_for(len)],
        };
        v.mask_tail();
        v
    }

    /// Builds a vector from raw words, clearing any bits past `len`.
    pub fn from_words(len: usize, words: Vec<Word>) -> Result<Self> {
        if words.len() != words_for(len) {
            return Err(Error::Dimension(format!(
                "{} words cannot hold exactly {len} bits",
                words.len()
            )));
        }
        let mut v = BitVector { len, words };
        v.mask_tail();
        Ok(v)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        popcount(&self.words)
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.words)
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    fn check_len(&self, other: &BitVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::Dimension(format!(
                "vector lengths differ: {} vs {}",
                self.len, other.len
            )));
        }
        Ok(())
    }

    /// Component-wise OR.
    pub fn disjunction(&self, other: &BitVector) -> Result<BitVector> {
        self.check_len(other)?;
        let mut out = self.clone();
        or_assign(&mut out.words, &other.words);
        Ok(out)
    }

    /// Component-wise AND.
    pub fn conjunction(&self, other: &BitVector) -> Result<BitVector> {
        self.check_len(other)?;
        let mut out = self.clone();
        and_assign(&mut out.words, &other.words);
        Ok(out)
    }

    /// `self` covers `u` when `u | self == self`.
    pub fn covers(&self, u: &BitVector) -> Result<bool> {
        self.check_len(u)?;
        Ok(is_covered(&u.words, &self.words))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    /// Parses a string of `0`/`1` characters, first character = bit 0.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::parse(1, 1, "empty bit string"));
        }
        let mut v = BitVector::zeros(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Error::parse(
                        1,
                        i + 1,
                        format!("unexpected character {other:?}, expected 0 or 1"),
                    ))
                }
            }
        }
        Ok(v)
    }
}

impl serde::Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}
