//! Weak Goldbach decompositions over a prime table.
//!
//! Only odd primes take part: the weak form writes odd `n > 7` as
//! `p1 + p2 + p3` with `p1 <= p2 <= p3` odd primes (repeats allowed), and the
//! inner two-prime step is restricted to odd primes as well.

mod checkpoint;
mod verify;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::ClassificationTable;
use crate::error::{Error, Result};

pub use checkpoint::{read_checkpoints, CheckpointLog, CheckpointRecord};
pub use verify::{
    verify_fingerprint, verify_range, verify_range_until, RunOutcome, VerificationReport,
    VerifyConfig, DEFAULT_CHECKPOINT_EVERY,
};

/// Representation counting is quadratic in the number of primes below `n`.
pub const REPRESENTATION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GoldbachTriple {
    n: u64,
    p1: u64,
    p2: u64,
    p3: u64,
}

impl GoldbachTriple {
    /// Validates every invariant against `table` rather than trusting the
    /// caller.
    pub fn new(n: u64, p1: u64, p2: u64, p3: u64, table: &ClassificationTable) -> Result<Self> {
        let valid = n % 2 == 1
            && n > 7
            && p1 <= p2
            && p2 <= p3
            && p1.checked_add(p2).and_then(|s| s.checked_add(p3)) == Some(n)
            && p3 <= table.bound()
            && [p1, p2, p3]
                .iter()
                .all(|&p| p > 2 && p % 2 == 1 && table.is_odd_prime(p));
        if !valid {
            return Err(Error::config(format!(
                "invalid Goldbach triple {n} = {p1} + {p2} + {p3}"
            )));
        }
        Ok(GoldbachTriple { n, p1, p2, p3 })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn primes(&self) -> [u64; 3] {
        [self.p1, self.p2, self.p3]
    }
}

fn require_table(table: &ClassificationTable, n: u64) -> Result<()> {
    if n > table.bound() {
        return Err(Error::OutOfRange {
            n,
            lo: 2,
            hi: table.bound(),
        });
    }
    Ok(())
}

/// Smallest odd prime `p2` with `m - p2` also an odd prime, as `(p2, m - p2)`.
/// `None` would be a strong Goldbach counterexample.
pub fn decompose_strong_pair(m: u64, table: &ClassificationTable) -> Result<Option<(u64, u64)>> {
    if m % 2 == 1 || m < 6 {
        return Err(Error::config(format!(
            "strong pair needs an even m >= 6, got {m}"
        )));
    }
    require_table(table, m - 3)?;
    Ok(strong_pair_unchecked(m, table))
}

#[inline]
fn strong_pair_unchecked(m: u64, table: &ClassificationTable) -> Option<(u64, u64)> {
    let mut p = 3;
    while p <= m / 2 {
        if table.is_odd_prime(p) && table.is_odd_prime(m - p) {
            return Some((p, m - p));
        }
        p += 2;
    }
    None
}

/// Lexicographically smallest odd-prime triple summing to `n`.
///
/// `p1` runs up over the odd primes and `n - p1` is split with
/// [`decompose_strong_pair`]. The first `p1` that splits is the smallest
/// prime occurring in any triple, which also forces `p1 <= p2 <= p3`.
pub fn decompose_weak(n: u64, table: &ClassificationTable) -> Result<GoldbachTriple> {
    if n % 2 == 0 || n <= 7 {
        return Err(Error::config(format!(
            "weak decomposition needs an odd n > 7, got {n}"
        )));
    }
    require_table(table, n)?;
    decompose_weak_unchecked(n, table)
}

pub(crate) fn decompose_weak_unchecked(
    n: u64,
    table: &ClassificationTable,
) -> Result<GoldbachTriple> {
    let mut p1 = 3;
    while 3 * p1 <= n {
        if table.is_odd_prime(p1) {
            if let Some((p2, p3)) = strong_pair_unchecked(n - p1, table) {
                return GoldbachTriple::new(n, p1, p2, p3, table);
            }
        }
        p1 += 2;
    }
    Err(Error::NoTripleFound(n))
}

/// Number of multisets `{p1 <= p2 <= p3}` of odd primes summing to `n`.
pub fn count_representations(n: u64, table: &ClassificationTable) -> Result<u64> {
    if n > REPRESENTATION_LIMIT {
        return Err(Error::Complexity(format!(
            "representation counting is limited to n <= {REPRESENTATION_LIMIT}, got {n}"
        )));
    }
    if n % 2 == 0 || n < 9 {
        return Err(Error::config(format!(
            "representation count needs an odd n >= 9, got {n}"
        )));
    }
    require_table(table, n)?;
    Ok(count_representations_unchecked(n, table))
}

pub(crate) fn count_representations_unchecked(n: u64, table: &ClassificationTable) -> u64 {
    let mut count = 0;
    let mut p1 = 3;
    while 3 * p1 <= n {
        if table.is_odd_prime(p1) {
            let rest = n - p1;
            let mut p2 = p1;
            while 2 * p2 <= rest {
                if table.is_odd_prime(p2) && table.is_odd_prime(rest - p2) {
                    count += 1;
                }
                p2 += 2;
            }
        }
        p1 += 2;
    }
    count
}

/// Samples `sample_count` triples of odd numbers `> 1` from a seeded stream
/// and checks each sum is odd and greater than 7.
pub fn three_odds_sum_property(sample_count: u64, seed: u64) -> Result<bool> {
    if sample_count == 0 {
        return Err(Error::config("sample count must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // keep the sum well inside u64
    let mut odd = || 2 * rng.gen_range(1u64..=1 << 60) + 1;
    Ok((0..sample_count).all(|_| {
        let s = odd() + odd() + odd();
        s % 2 == 1 && s > 7
    }))
}
