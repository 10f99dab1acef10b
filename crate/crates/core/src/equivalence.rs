//! Set-level comparisons between constructions.
//!
//! Two constructions are treated as equivalent when they cross the same
//! numbers and leave the same survivors. Their anchor sets are reported
//! separately, since Case II spawns strictly more terms than Case I.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::engine::{materialize_with, Class, ClassCounts, ClassificationTable, SieveOptions};
use crate::error::{Error, Result};
use crate::numberline::{
    spawn_construction, ConstructionDescriptor, SieveConstruction, SieveTerm, SpawnRule, Variant,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorRelation {
    Equal,
    LeftSubsetOfRight,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub bound: u64,
    pub left_construction: ConstructionDescriptor,
    pub right_construction: ConstructionDescriptor,
    pub crossed_sets_equal: bool,
    pub survivor_sets_equal: bool,
    pub anchor_relation: AnchorRelation,
    pub first_divergence: Option<u64>,
    pub left_counts: ClassCounts,
    pub right_counts: ClassCounts,
}

impl EquivalenceReport {
    pub fn equivalent(&self) -> bool {
        self.crossed_sets_equal && self.survivor_sets_equal
    }
}

pub fn anchor_relation(left: &[u64], right: &[u64]) -> AnchorRelation {
    if left == right {
        return AnchorRelation::Equal;
    }
    // both sorted ascending
    let mut r = right.iter().peekable();
    for &a in left {
        while r.next_if(|&&b| b < a).is_some() {}
        if r.next_if(|&&b| b == a).is_none() {
            return AnchorRelation::Incomparable;
        }
    }
    AnchorRelation::LeftSubsetOfRight
}

/// Compares two already materialized constructions.
pub fn compare_tables(
    left: (&SieveConstruction, &ClassificationTable),
    right: (&SieveConstruction, &ClassificationTable),
) -> EquivalenceReport {
    let (lc, lt) = left;
    let (rc, rt) = right;
    let first_divergence = lt
        .first_divergence(rt)
        .or_else(|| (lt.bound() != rt.bound()).then(|| lt.bound().min(rt.bound()) + 1));
    let (crossed_sets_equal, survivor_sets_equal) = match first_divergence {
        None => (true, true),
        Some(start) => {
            let upto = lt.bound().max(rt.bound());
            let class = |t: &ClassificationTable, n: u64| t.class(n).ok();
            let mut crossed_eq = true;
            let mut survivor_eq = true;
            for n in start..=upto {
                let (a, b) = (class(lt, n), class(rt, n));
                crossed_eq &= (a == Some(Class::Crossed)) == (b == Some(Class::Crossed));
                survivor_eq &= (a == Some(Class::Survivor)) == (b == Some(Class::Survivor));
                if !crossed_eq && !survivor_eq {
                    break;
                }
            }
            (crossed_eq, survivor_eq)
        }
    };
    EquivalenceReport {
        bound: lt.bound().max(rt.bound()),
        left_construction: lc.descriptor(),
        right_construction: rc.descriptor(),
        crossed_sets_equal,
        survivor_sets_equal,
        anchor_relation: anchor_relation(lc.anchors(), rc.anchors()),
        first_divergence: if crossed_sets_equal && survivor_sets_equal {
            None
        } else {
            first_divergence
        },
        left_counts: lt.counts(),
        right_counts: rt.counts(),
    }
}

pub fn compare_constructions(
    variant: Variant,
    bound: u64,
    odd_primes_only: bool,
) -> Result<EquivalenceReport> {
    compare_constructions_with(variant, bound, odd_primes_only, &SieveOptions::default())
}

/// Builds the Case I and Case II constructions for `variant` over
/// `[2, bound]`, materializes both and compares them (Case I on the left).
pub fn compare_constructions_with(
    variant: Variant,
    bound: u64,
    odd_primes_only: bool,
    opts: &SieveOptions,
) -> Result<EquivalenceReport> {
    let left = spawn_construction(variant, SpawnRule::CaseI, bound, odd_primes_only)?;
    let right = spawn_construction(variant, SpawnRule::CaseII, bound, odd_primes_only)?;
    let lt = materialize_with(&left, opts)?;
    let rt = materialize_with(&right, opts)?;
    Ok(compare_tables((&left, &lt), (&right, &rt)))
}

/// Even numbers crossed by the anchor-2 term but by no odd prime term.
pub fn powers_of_two_residue(bound: u64) -> Result<Vec<u64>> {
    powers_of_two_residue_with(bound, &SieveOptions::default())
}

pub fn powers_of_two_residue_with(bound: u64, opts: &SieveOptions) -> Result<Vec<u64>> {
    if bound < 4 {
        return Err(Error::config(format!(
            "residue bound must be >= 4, got {bound}"
        )));
    }
    let odd_terms = spawn_construction(Variant::Full, SpawnRule::CaseI, bound, true)?;
    let table = materialize_with(&odd_terms, opts)?;
    let two = SieveTerm::full(2)?;
    Ok(two
        .crossings(bound)
        .filter(|&n| table.class(n).ok() == Some(Class::Survivor))
        .collect())
}

/// True when the terms behave identically on `[2, bound]`.
pub fn terms_behave_identically(a: SieveTerm, b: SieveTerm, bound: u64) -> bool {
    a.crossings(bound).eq(b.crossings(bound))
}

/// Checks that two terms of `variant` have identical zero-cross behavior on
/// `[2, bound]` exactly when their anchors are equal.
///
/// Anchors whose first crossing lies beyond `bound` cross nothing in range
/// and are indistinguishable there, so only anchors with at least one
/// crossing in range take part.
pub fn reduction_identity_check(bound: u64, variant: Variant) -> Result<bool> {
    if bound < 2 {
        return Err(Error::config(format!("bound must be >= 2, got {bound}")));
    }
    let anchors: Vec<u64> = match variant {
        Variant::Full => (2..=bound / 2).collect(),
        Variant::OddOnly => (3..=bound / 3).step_by(2).collect(),
    };
    let mut seen: HashMap<Vec<u64>, u64> = HashMap::with_capacity(anchors.len());
    for a in anchors {
        let term = SieveTerm::new(a, variant)?;
        let signature: Vec<u64> = term.crossings(bound).collect();
        if seen.insert(signature, a).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every term spawned at a composite anchor under Case II crosses only
/// numbers the Case I construction already crosses.
pub fn case_two_conservative(variant: Variant, bound: u64, odd_primes_only: bool) -> Result<bool> {
    let case_one = spawn_construction(variant, SpawnRule::CaseI, bound, odd_primes_only)?;
    let case_two = spawn_construction(variant, SpawnRule::CaseII, bound, odd_primes_only)?;
    let table = materialize_with(&case_one, &SieveOptions::default())?;
    for term in case_two.terms() {
        if case_one.contains_anchor(term.anchor()) {
            continue;
        }
        if term
            .crossings(bound)
            .any(|n| table.class(n).ok() != Some(Class::Crossed))
        {
            return Ok(false);
        }
    }
    Ok(true)
}
