use rayon::prelude::*;

use super::{
    isqrt, odd_word_count, ClassificationTable, Evens, Provenance, SegmentPlan, SieveOptions,
};
use crate::error::{Error, Result};

/// Odd primes up to `limit` with a plain byte sieve. Only used for the base
/// primes of the segmented sieve, so `limit` is around `sqrt(bound)`.
pub fn base_primes(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    let mut p = 3;
    while p <= limit {
        if !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= limit {
                composite[m] = true;
                m += 2 * p;
            }
        }
        p += 2;
    }
    out
}

pub fn classical_sieve(bound: u64) -> Result<ClassificationTable> {
    classical_sieve_with(bound, &SieveOptions::default())
}

/// Segmented, odd-packed sieve of Eratosthenes over `[2, bound]`.
///
/// Segments cover disjoint word ranges of the odd bitset and are sieved
/// concurrently against a shared base-prime list. The result does not depend
/// on the segment length or worker count.
pub fn classical_sieve_with(bound: u64, opts: &SieveOptions) -> Result<ClassificationTable> {
    if bound < 2 {
        return Err(Error::config(format!(
            "sieve bound must be >= 2, got {bound}"
        )));
    }
    let plan = SegmentPlan::new(bound, opts.segment_length)?;
    let words = odd_word_count(bound);
    opts.check_budget(words as u64 * 8)?;

    let primes = base_primes(isqrt(bound));
    let odd_numbers = bound.div_ceil(2);
    let mut odd = vec![0u64; words];
    let seg_words = plan.words_per_segment();

    let sieve_all = |odd: &mut [u64]| {
        odd.par_chunks_mut(seg_words)
            .enumerate()
            .for_each(|(k, seg)| {
                sieve_segment(seg, k as u64 * plan.segment_length, odd_numbers, &primes)
            });
    };
    match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::config(format!("worker pool: {e}")))?
            .install(|| sieve_all(&mut odd)),
        None => sieve_all(&mut odd),
    }

    Ok(ClassificationTable::from_parts(
        bound,
        odd,
        Evens::Standard,
        Provenance::ClassicalOracle,
    ))
}

/// Marks odd composites in the odd-index window `[lo_idx, lo_idx + 64 * seg.len())`
/// clipped to `odd_numbers`.
fn sieve_segment(seg: &mut [u64], lo_idx: u64, odd_numbers: u64, primes: &[u64]) {
    let hi_idx = (lo_idx + seg.len() as u64 * 64).min(odd_numbers);
    let lo_n = 2 * lo_idx + 1;
    for &p in primes {
        let sq = p * p;
        let start = if sq >= lo_n {
            sq
        } else {
            let mut m = lo_n.div_ceil(p) * p;
            if m % 2 == 0 {
                m += p;
            }
            m
        };
        let mut idx = (start - 1) / 2;
        if idx >= hi_idx {
            continue;
        }
        while idx < hi_idx {
            let local = idx - lo_idx;
            seg[(local >> 6) as usize] |= 1 << (local & 63);
            idx += p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::tests::is_prime_trial;
    use crate::engine::Class;

    #[test]
    fn small_bounds() {
        let t = classical_sieve(30).unwrap();
        let primes: Vec<u64> = t.primes_iter().unwrap().collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        let t = classical_sieve(2).unwrap();
        assert_eq!(t.primes_iter().unwrap().collect::<Vec<_>>(), vec![2]);
        assert!(classical_sieve(1).is_err());
        assert!(classical_sieve(0).is_err());
    }

    #[test]
    fn matches_trial_division() {
        for bound in [3, 4, 9, 25, 64, 120, 121, 1000, 4099] {
            let t = classical_sieve(bound).unwrap();
            for n in 2..=bound {
                let want = if is_prime_trial(n) {
                    Class::Survivor
                } else {
                    Class::Crossed
                };
                assert_eq!(t.class(n).unwrap(), want, "n = {n}, bound = {bound}");
            }
        }
    }

    #[test]
    fn base_primes_small() {
        assert_eq!(base_primes(2), Vec::<u64>::new());
        assert_eq!(base_primes(3), vec![3]);
        assert_eq!(base_primes(30), vec![3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn segment_length_and_workers_do_not_matter() {
        let bound = 200_003;
        let reference = classical_sieve(bound).unwrap();
        for seg in [64, 128, 1024, 1 << 16] {
            for workers in [Some(1), Some(3), None] {
                let opts = SieveOptions {
                    segment_length: seg,
                    workers,
                    ..SieveOptions::default()
                };
                let t = classical_sieve_with(bound, &opts).unwrap();
                assert_eq!(
                    t.odd_words(),
                    reference.odd_words(),
                    "seg {seg}, workers {workers:?}"
                );
            }
        }
    }

    #[test]
    fn known_prime_count() {
        // pi(10^4) by trial division, pi(10^6) cross-checked against an
        // independent reference count.
        let t = classical_sieve(10_000).unwrap();
        let oracle = (2..=10_000u64).filter(|&n| is_prime_trial(n)).count() as u64;
        assert_eq!(oracle, 1229);
        assert_eq!(t.prime_count(10_000).unwrap(), oracle);
        let t = classical_sieve(1_000_000).unwrap();
        assert_eq!(t.prime_count(1_000_000).unwrap(), 78_498);
    }

    #[test]
    fn budget_is_enforced() {
        let opts = SieveOptions {
            memory_budget: 1024,
            ..SieveOptions::default()
        };
        assert!(classical_sieve_with(16_000, &opts).is_ok());
        match classical_sieve_with(1_000_000, &opts) {
            Err(Error::Capacity { budget, requested }) => {
                assert_eq!(budget, 1024);
                assert_eq!(requested, 62_504);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }
}
