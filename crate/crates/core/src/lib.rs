//! Periodic zero-cross sieves over the integers.
//!
//! A sieve term anchored at `a` zero-crosses the multiples of `a` beyond the
//! anchor (or only the odd multiples, when its period is doubled). Sets of
//! terms spawned under different rules decode the same primes; this crate
//! materializes those constructions, compares them, verifies the weak
//! Goldbach property over finite ranges, and draws the number-line figures.
//!
//! ```
//! use harmonic_sieve::goldbach::{decompose_weak, verify_range, VerifyConfig};
//! use harmonic_sieve::{classical_sieve, materialize, spawn_construction, SpawnRule, Variant};
//!
//! let table = classical_sieve(1_000_000)?;
//! assert_eq!(table.prime_count(1_000_000)?, 78_498);
//!
//! let construction = spawn_construction(Variant::Full, SpawnRule::CaseI, 1_000_000, false)?;
//! assert!(materialize(&construction)?.same_classification(&table));
//!
//! assert_eq!(decompose_weak(101, &table)?.primes(), [3, 19, 79]);
//! assert!(verify_range(&VerifyConfig::new(9, 1_000_000), &table)?.success);
//! # Ok::<(), harmonic_sieve::Error>(())
//! ```

pub mod config;
pub mod engine;
pub mod equivalence;
mod error;
pub mod goldbach;
pub mod numberline;
pub mod plot;

pub use engine::{
    classical_sieve, classical_sieve_with, materialize, materialize_with, read_cache, write_cache,
    Class, ClassCounts, ClassificationTable, Provenance, SegmentPlan, SieveOptions,
};
pub use error::{Error, Result};
pub use numberline::{
    crossers_of, spawn_construction, zero_cross, SieveConstruction, SieveTerm, SpawnRule, Variant,
};
