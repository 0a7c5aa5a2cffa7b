//! Online prefix-free code allocation with prescribed lengths.
//!
//! Free space in `[0, 1)` is kept as a set of maximal dyadic intervals,
//! each named by the bitstring whose extensions it contains. A request for
//! length `n` takes the leftmost free interval of size at least `2^-n`,
//! hands out its leftmost length-`n` subinterval and returns the right
//! siblings along the way to the free set. The codeword issued is always
//! the lexicographically least length-`n` string still available.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::BitString;
use crate::numbers::Dyadic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KraftError {
    /// Issuing a codeword of this length would push the Kraft sum past 1.
    KraftExceeded { index: usize, length: usize },
    /// The mass is available but no single free interval is large enough.
    /// Leftmost allocation has not been observed to reach this state.
    Fragmented { index: usize, length: usize },
}

impl fmt::Display for KraftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KraftError::KraftExceeded { index, length } => {
                write!(f, "length {length} at index {index} exceeds the Kraft sum")
            }
            KraftError::Fragmented { index, length } => {
                write!(f, "no free interval for length {length} at index {index}")
            }
        }
    }
}

impl core::error::Error for KraftError {}

/// Sequential allocator; callers serialize access.
#[derive(Debug, Clone)]
pub struct CodeAllocator {
    // Vec<bool> orders lexicographically, which for pairwise
    // prefix-incomparable strings is left-to-right position in [0, 1)
    free: BTreeSet<Vec<bool>>,
    consumed: Dyadic,
    issued: usize,
}

impl Default for CodeAllocator {
    fn default() -> Self {
        CodeAllocator::new()
    }
}

impl CodeAllocator {
    pub fn new() -> Self {
        CodeAllocator {
            free: BTreeSet::from([Vec::new()]),
            consumed: Dyadic::zero(),
            issued: 0,
        }
    }

    /// `Σ 2^{-n_i}` over the codewords issued so far.
    pub fn consumed_mass(&self) -> &Dyadic {
        &self.consumed
    }

    pub fn free_mass(&self) -> Dyadic {
        self.free.iter().map(|s| Dyadic::pow2_neg(s.len() as u64)).sum()
    }

    pub fn issued(&self) -> usize {
        self.issued
    }

    /// Free intervals in left-to-right order.
    pub fn free_intervals(&self) -> impl Iterator<Item = BitString> + '_ {
        self.free.iter().map(|s| BitString::from(s.as_slice()))
    }

    pub fn assign_next(&mut self, length: usize) -> Result<BitString, KraftError> {
        let index = self.issued;
        let mass = Dyadic::pow2_neg(length as u64);
        let after = &self.consumed + &mass;
        if after > Dyadic::one() {
            return Err(KraftError::KraftExceeded { index, length });
        }
        let interval = self
            .free
            .iter()
            .find(|s| s.len() <= length)
            .cloned()
            .ok_or(KraftError::Fragmented { index, length })?;
        self.free.remove(&interval);
        let mut word = interval;
        while word.len() < length {
            let mut sibling = word.clone();
            sibling.push(true);
            self.free.insert(sibling);
            word.push(false);
        }
        self.consumed = after;
        self.issued += 1;
        Ok(BitString::from_bits(word))
    }

    /// Lazily assigns codewords for a (possibly unbounded) length stream.
    pub fn assign_stream<'a, I>(&'a mut self, lengths: I) -> impl Iterator<Item = Result<BitString, KraftError>> + 'a
    where
        I: IntoIterator<Item = usize>,
        I::IntoIter: 'a,
    {
        lengths.into_iter().map(move |n| self.assign_next(n))
    }
}

/// Codewords for a finite length sequence, failing at the first index whose
/// length would exceed the Kraft sum.
pub fn assign_all(lengths: &[usize]) -> Result<Vec<BitString>, KraftError> {
    let mut allocator = CodeAllocator::new();
    lengths.iter().map(|&n| allocator.assign_next(n)).collect()
}

/// `Σ 2^{-n_i}`.
pub fn kraft_sum(lengths: &[usize]) -> Dyadic {
    lengths.iter().map(|&n| Dyadic::pow2_neg(n as u64)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::{String, ToString};
    use proptest::prelude::*;

    fn words(lengths: &[usize]) -> Vec<String> {
        assign_all(lengths).unwrap().iter().map(ToString::to_string).collect()
    }

    #[test]
    fn leftmost_examples() {
        assert_eq!(words(&[1, 2, 3, 3]), ["0", "10", "110", "111"]);
        assert_eq!(words(&[2, 1]), ["00", "1"]);
        assert_eq!(words(&[3, 1, 2, 3]), ["000", "1", "01", "001"]);
        assert!(words(&[]).is_empty());
    }

    #[test]
    fn overflow_reports_first_index() {
        assert_eq!(
            assign_all(&[1, 1, 1]),
            Err(KraftError::KraftExceeded { index: 2, length: 1 })
        );
        assert_eq!(
            assign_all(&[2, 2, 1, 3]),
            Err(KraftError::KraftExceeded { index: 3, length: 3 })
        );
    }

    #[test]
    fn empty_word_takes_everything() {
        let mut a = CodeAllocator::new();
        assert_eq!(a.assign_next(0), Ok(BitString::empty()));
        assert_eq!(a.assign_next(5), Err(KraftError::KraftExceeded { index: 1, length: 5 }));
        assert_eq!(a.free_mass(), Dyadic::zero());
    }

    #[test]
    fn doubling_schedule() {
        // two words of length 2, then four of length 4
        let lengths = [2, 2, 4, 4, 4, 4];
        assert_eq!(words(&lengths), ["00", "01", "1000", "1001", "1010", "1011"]);
        assert_eq!(kraft_sum(&lengths), "3/4".parse().unwrap());
    }

    #[test]
    fn streaming_matches_batch() {
        let mut a = CodeAllocator::new();
        let streamed: Vec<_> = a.assign_stream((1..).take(10)).collect::<Result<_, _>>().unwrap();
        assert_eq!(streamed, assign_all(&(1..=10).collect::<Vec<_>>()).unwrap());
        assert_eq!(a.consumed_mass(), &(Dyadic::one() - Dyadic::pow2_neg(10)));
    }

    fn valid_lengths() -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::vec(0usize..12, 0..40).prop_map(|raw| {
            let mut mass = Dyadic::zero();
            raw.into_iter()
                .filter(|&n| {
                    let next = &mass + &Dyadic::pow2_neg(n as u64);
                    let ok = next <= Dyadic::one();
                    if ok {
                        mass = next;
                    }
                    ok
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn valid_sequences_get_prefix_free_codes(lengths in valid_lengths()) {
            let mut a = CodeAllocator::new();
            let mut out = Vec::new();
            for &n in &lengths {
                out.push(a.assign_next(n).unwrap());
                prop_assert_eq!(&a.free_mass() + a.consumed_mass(), Dyadic::one());
            }
            prop_assert_eq!(a.consumed_mass(), &kraft_sum(&lengths));
            for (i, w) in out.iter().enumerate() {
                prop_assert_eq!(w.len(), lengths[i]);
                for (j, v) in out.iter().enumerate() {
                    prop_assert!(i == j || !w.is_prefix_of(v));
                }
            }
        }
    }
}
