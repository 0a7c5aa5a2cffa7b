//! Finite binary strings and the `B`/`N` bijection between natural numbers
//! and strings in length-lexicographic order.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// A finite binary string, most significant (leftmost) bit first.
///
/// Ordering is length-lexicographic: shorter strings first, then
/// lexicographic with `0 < 1`. This is the order in which [`decode_n`] is
/// monotone.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub const fn empty() -> Self {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(len: usize) -> Self {
        BitString(alloc::vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        BitString(alloc::vec![true; len])
    }

    /// The `len` low-order bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        BitString((0..len).rev().map(|i| i < 64 && (value >> i) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.0.get(index).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.0);
        bits.extend_from_slice(&other.0);
        BitString(bits)
    }

    pub fn with_bit(&self, bit: bool) -> BitString {
        let mut out = self.clone();
        out.push(bit);
        out
    }

    /// The first `len` bits. Panics if `len > self.len()`.
    pub fn prefix(&self, len: usize) -> BitString {
        BitString(self.0[..len].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> BitString {
        BitString(self.0[start..].to_vec())
    }

    /// True when `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &BitString) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    /// All strings of length `len` in increasing order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "refusing to enumerate 2^{len} strings");
        (0..1u64 << len).map(move |v| BitString::from_u64(v, len))
    }

    /// All strings of length at most `max_len`, in length-lexicographic order.
    pub fn all_up_to_length(max_len: usize) -> impl Iterator<Item = BitString> {
        (0..=max_len).flat_map(BitString::all_of_length)
    }

    pub fn to_ascii(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("λ")
        } else {
            write!(f, "\"{self}\"")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidBit {
    pub position: usize,
    pub found: char,
}

impl fmt::Display for InvalidBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid bit {:?} at position {}", self.found, self.position)
    }
}

impl core::error::Error for InvalidBit {}

impl FromStr for BitString {
    type Err = InvalidBit;

    /// Parses ASCII `0`/`1`. The empty string and `λ` both denote the empty
    /// bitstring.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "λ" {
            return Ok(BitString::empty());
        }
        s.chars()
            .enumerate()
            .map(|(position, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                found => Err(InvalidBit { position, found }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl From<&[bool]> for BitString {
    fn from(bits: &[bool]) -> Self {
        BitString(bits.to_vec())
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitString(iter.into_iter().collect())
    }
}

/// `B(n)`: the binary expansion of `n + 1` with its leading 1 removed.
pub fn encode_b(n: &BigUint) -> BitString {
    let m = n + 1u32;
    let width = m.bits() as usize;
    (0..width - 1).rev().map(|i| m.bit(i as u64)).collect()
}

pub fn encode_b_u64(n: u64) -> BitString {
    encode_b(&BigUint::from(n))
}

/// `N(x)`, the inverse of [`encode_b`].
pub fn decode_n(x: &BitString) -> BigUint {
    let mut acc = BigUint::one();
    for bit in x.iter() {
        acc <<= 1u32;
        if bit {
            acc += 1u32;
        }
    }
    acc - 1u32
}

/// `N(x)` when it fits in a `u64` (strings of length ≤ 63).
pub fn decode_n_u64(x: &BitString) -> Option<u64> {
    decode_n(x).to_u64()
}

/// `2^k` as a big integer.
pub fn pow2(k: usize) -> BigUint {
    let mut v = BigUint::zero();
    v.set_bit(k as u64, true);
    v
}
