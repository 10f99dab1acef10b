//! Materialized classification tables.
//!
//! Odd numbers are packed one bit per number (bit `i` of the odd bitset is
//! `2i + 1`, set means crossed). Evens are either implied (the classical
//! layout, where 2 is the only even survivor), stored explicitly (full
//! harmonic tables, which can leave powers of two uncrossed), or left
//! untouched (odd-only tables never look at evens).

mod cache;
mod classical;
mod harmonic;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numberline::{SpawnRule, Variant};

pub use cache::{
    read_cache, read_cache_from, write_cache, write_cache_to, CACHE_MAGIC, CACHE_VERSION,
};
pub use classical::{base_primes, classical_sieve, classical_sieve_with};
pub use harmonic::{materialize, materialize_with};

pub const DEFAULT_SEGMENT_LENGTH: u64 = 1 << 20;
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

/// Per-number verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    /// Crossed by no term: a decoded prime (or a power of two when the
    /// anchor-2 term is excluded).
    Survivor,
    /// Zero-crossed by at least one term.
    Crossed,
    /// Outside the construction's scope (evens under the odd-only variant).
    Untouched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    ClassicalOracle,
    Harmonic {
        variant: Variant,
        rule: SpawnRule,
        odd_primes_only: bool,
    },
    /// Loaded from an HSV1 file; only the odd bits are stored there.
    Cache,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::ClassicalOracle => f.write_str("classical"),
            Provenance::Harmonic {
                variant,
                rule,
                odd_primes_only,
            } => {
                write!(f, "harmonic-{rule}/{variant}")?;
                if *odd_primes_only {
                    f.write_str("/odd-primes-only")?;
                }
                Ok(())
            }
            Provenance::Cache => f.write_str("cache"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Evens {
    /// 2 survives, every larger even is crossed.
    Standard,
    Untouched,
    /// Bit `j` is the even number `2j`; set means crossed.
    Explicit(Vec<u64>),
}

/// Segment sizing for the classical sieve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentPlan {
    /// Odd numbers per segment. Power of two, at least 64.
    pub segment_length: u64,
    pub base_primes_bound: u64,
}

impl SegmentPlan {
    pub fn new(bound: u64, segment_length: u64) -> Result<Self> {
        if segment_length < 64 || !segment_length.is_power_of_two() {
            return Err(Error::config(format!(
                "segment length must be a power of two >= 64, got {segment_length}"
            )));
        }
        Ok(SegmentPlan {
            segment_length,
            base_primes_bound: isqrt(bound) + 1,
        })
    }

    pub(crate) fn words_per_segment(&self) -> usize {
        (self.segment_length / 64) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveOptions {
    pub segment_length: u64,
    pub memory_budget: u64,
    /// `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions {
            segment_length: DEFAULT_SEGMENT_LENGTH,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            workers: None,
        }
    }
}

impl SieveOptions {
    pub(crate) fn check_budget(&self, requested: u64) -> Result<()> {
        if requested > self.memory_budget {
            return Err(Error::Capacity {
                requested,
                budget: self.memory_budget,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub crossed: u64,
    pub survivor: u64,
    pub untouched: u64,
}

/// Number of 64-bit words holding the odd numbers `1, 3, ..., <= bound`.
pub(crate) fn odd_word_count(bound: u64) -> usize {
    let odd_numbers = bound.div_ceil(2) as usize;
    odd_numbers.div_ceil(64)
}

pub(crate) fn even_word_count(bound: u64) -> usize {
    (bound as usize / 2 + 1).div_ceil(64)
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = ((n as f64).sqrt() as u64).min(u32::MAX as u64);
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

#[inline]
fn bit(words: &[u64], i: u64) -> bool {
    words[(i >> 6) as usize] >> (i & 63) & 1 == 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationTable {
    bound: u64,
    odd: Vec<u64>,
    evens: Evens,
    provenance: Provenance,
}

impl ClassificationTable {
    pub(crate) fn from_parts(
        bound: u64,
        odd: Vec<u64>,
        evens: Evens,
        provenance: Provenance,
    ) -> Self {
        debug_assert_eq!(odd.len(), odd_word_count(bound));
        ClassificationTable {
            bound,
            odd,
            evens,
            provenance,
        }
    }

    #[inline]
    pub fn bound(&self) -> u64 {
        self.bound
    }

    #[inline]
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Packed odd composite flags, the payload of an HSV1 file.
    pub fn odd_words(&self) -> &[u64] {
        &self.odd
    }

    /// True when survivors are exactly the primes in `[2, bound]`.
    pub fn yields_primes(&self) -> bool {
        match self.provenance {
            Provenance::ClassicalOracle | Provenance::Cache => true,
            Provenance::Harmonic {
                variant,
                odd_primes_only,
                ..
            } => variant == Variant::Full && !odd_primes_only,
        }
    }

    fn check_range(&self, n: u64) -> Result<()> {
        if n < 2 || n > self.bound {
            return Err(Error::OutOfRange {
                n,
                lo: 2,
                hi: self.bound,
            });
        }
        Ok(())
    }

    pub fn class(&self, n: u64) -> Result<Class> {
        self.check_range(n)?;
        Ok(self.class_unchecked(n))
    }

    #[inline]
    pub(crate) fn class_unchecked(&self, n: u64) -> Class {
        if n & 1 == 1 {
            return if bit(&self.odd, n >> 1) {
                Class::Crossed
            } else {
                Class::Survivor
            };
        }
        match &self.evens {
            Evens::Standard if n == 2 => Class::Survivor,
            Evens::Standard => Class::Crossed,
            Evens::Untouched => Class::Untouched,
            Evens::Explicit(words) => {
                if bit(words, n >> 1) {
                    Class::Crossed
                } else {
                    Class::Survivor
                }
            }
        }
    }

    /// Odd prime lookup for odd `n` in `[3, bound]`. Every provenance stores
    /// odd composites identically, so this is valid on any table.
    #[inline]
    pub fn is_odd_prime(&self, n: u64) -> bool {
        debug_assert!(n & 1 == 1 && n >= 3 && n <= self.bound);
        !bit(&self.odd, n >> 1)
    }

    pub fn counts(&self) -> ClassCounts {
        let odd_total = self.bound.div_ceil(2) - 1; // odd numbers in [3, bound]
        let odd_crossed: u64 = self.odd.iter().map(|w| w.count_ones() as u64).sum();
        let even_total = self.bound / 2;
        let (even_crossed, even_untouched) = match &self.evens {
            Evens::Standard => (even_total - 1, 0),
            Evens::Untouched => (0, even_total),
            Evens::Explicit(words) => (words.iter().map(|w| w.count_ones() as u64).sum(), 0),
        };
        let crossed = odd_crossed + even_crossed;
        ClassCounts {
            crossed,
            untouched: even_untouched,
            survivor: odd_total + even_total - crossed - even_untouched,
        }
    }

    /// Every `n` in `[2, bound]` with the given class, ascending.
    pub fn numbers_with(&self, class: Class) -> impl Iterator<Item = u64> + '_ {
        (2..=self.bound).filter(move |&n| self.class_unchecked(n) == class)
    }

    /// First `n` (ascending) whose classification differs between the two
    /// tables over their common range.
    pub fn first_divergence(&self, other: &ClassificationTable) -> Option<u64> {
        let upto = self.bound.min(other.bound);
        if upto < 2 {
            return None;
        }
        // Odd words are compared wholesale; only the last shared word needs
        // masking when the bounds differ.
        let first_odd = {
            let last_idx = (upto - 1) / 2;
            let words = (last_idx / 64 + 1) as usize;
            let mut found = None;
            for w in 0..words {
                let mut diff = self.odd[w] ^ other.odd[w];
                if w == words - 1 {
                    let used = last_idx % 64 + 1;
                    if used < 64 {
                        diff &= (1u64 << used) - 1;
                    }
                }
                if diff != 0 {
                    found = Some((w as u64 * 64 + diff.trailing_zeros() as u64) * 2 + 1);
                    break;
                }
            }
            found
        };
        let first_even = if self.evens == other.evens {
            None
        } else {
            (2..=upto)
                .step_by(2)
                .find(|&n| self.class_unchecked(n) != other.class_unchecked(n))
        };
        match (first_odd, first_even) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn same_classification(&self, other: &ClassificationTable) -> bool {
        self.bound == other.bound && self.first_divergence(other).is_none()
    }

    /// Primes in ascending order, streamed straight off the bitset.
    pub fn primes_iter(&self) -> Result<PrimeIter<'_>> {
        if !self.yields_primes() {
            return Err(Error::config(format!(
                "{} tables do not decode exactly the primes",
                self.provenance
            )));
        }
        Ok(PrimeIter {
            table: self,
            emitted_two: false,
            word: 0,
            pending: 0,
            started: false,
        })
    }

    /// Number of primes `<= x`.
    pub fn prime_count(&self, x: u64) -> Result<u64> {
        if !self.yields_primes() {
            return Err(Error::config(format!(
                "{} tables do not decode exactly the primes",
                self.provenance
            )));
        }
        self.check_range(x)?;
        let last_idx = (x - 1) / 2;
        let full_words = (last_idx / 64) as usize;
        let mut crossed: u64 = self.odd[..full_words]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        let rem = last_idx % 64 + 1;
        let mask = if rem == 64 {
            u64::MAX
        } else {
            (1u64 << rem) - 1
        };
        crossed += (self.odd[full_words] & mask).count_ones() as u64;
        // Indices 0..=last_idx minus crossed, minus 1 (which is not prime),
        // plus 2.
        Ok(last_idx + 1 - crossed)
    }

    pub fn max_prime(&self) -> Result<u64> {
        let mut it = self.primes_iter()?;
        let mut last = 2;
        for p in &mut it {
            last = p;
        }
        Ok(last)
    }
}

pub struct PrimeIter<'a> {
    table: &'a ClassificationTable,
    emitted_two: bool,
    word: usize,
    pending: u64,
    started: bool,
}

impl Iterator for PrimeIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if !self.emitted_two {
            self.emitted_two = true;
            return Some(2);
        }
        let odd_numbers = self.table.bound.div_ceil(2);
        loop {
            if self.pending != 0 {
                let b = self.pending.trailing_zeros() as u64;
                self.pending &= self.pending - 1;
                return Some((self.word as u64 * 64 + b) * 2 + 1);
            }
            if self.started {
                self.word += 1;
            }
            self.started = true;
            if self.word >= self.table.odd.len() {
                return None;
            }
            let mut live = !self.table.odd[self.word];
            if self.word == 0 {
                live &= !1; // 1 is not prime
            }
            let base = self.word as u64 * 64;
            if base + 64 > odd_numbers {
                let used = odd_numbers - base;
                live &= (1u64 << used) - 1;
            }
            self.pending = live;
        }
    }
}
