use super::{
    even_word_count, odd_word_count, ClassificationTable, Evens, Provenance, SieveOptions,
};
use crate::error::Result;
use crate::numberline::{SieveConstruction, Variant};

pub fn materialize(construction: &SieveConstruction) -> Result<ClassificationTable> {
    materialize_with(construction, &SieveOptions::default())
}

/// Evaluates every term of `construction` over `[2, bound]`.
///
/// Instead of testing each number against each term, every term strides
/// through its own crossings (`2a, 3a, ...` for full terms, `3a, 5a, ...` for
/// odd-only terms). The marked set is the same; the cost is that of a plain
/// Eratosthenes pass.
pub fn materialize_with(
    construction: &SieveConstruction,
    opts: &SieveOptions,
) -> Result<ClassificationTable> {
    let bound = construction.bound();
    let variant = construction.variant();
    let odd_words = odd_word_count(bound);
    let even_words = match variant {
        Variant::Full => even_word_count(bound),
        Variant::OddOnly => 0,
    };
    opts.check_budget((odd_words + even_words) as u64 * 8)?;

    let mut odd = vec![0u64; odd_words];
    let mut even = vec![0u64; even_words];

    let set = |words: &mut [u64], i: u64| words[(i >> 6) as usize] |= 1 << (i & 63);

    for term in construction.terms() {
        let a = term.anchor();
        match variant {
            Variant::OddOnly => {
                // odd multiples 3a, 5a, ...: odd index (n - 1) / 2 advances by a
                let Some(first) = a.checked_mul(3).filter(|&n| n <= bound) else {
                    continue;
                };
                let mut i = first >> 1;
                let last = (bound - 1) >> 1;
                while i <= last {
                    set(&mut odd, i);
                    i += a;
                }
            }
            Variant::Full if a % 2 == 1 => {
                let mut i = (3 * a) >> 1;
                let last_odd = (bound - 1) >> 1;
                while 3 * a <= bound && i <= last_odd {
                    set(&mut odd, i);
                    i += a;
                }
                // even multiples 2a, 4a, ...: even index n / 2 advances by a
                let mut j = a;
                let last_even = bound >> 1;
                while j <= last_even {
                    set(&mut even, j);
                    j += a;
                }
            }
            Variant::Full => {
                let half = a >> 1;
                let mut j = a;
                let last_even = bound >> 1;
                while j <= last_even {
                    set(&mut even, j);
                    j += half;
                }
            }
        }
    }

    let evens = match variant {
        Variant::Full => Evens::Explicit(even),
        Variant::OddOnly => Evens::Untouched,
    };
    Ok(ClassificationTable::from_parts(
        bound,
        odd,
        evens,
        Provenance::Harmonic {
            variant,
            rule: construction.rule(),
            odd_primes_only: construction.odd_primes_only(),
        },
    ))
}
