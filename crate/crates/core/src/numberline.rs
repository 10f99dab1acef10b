//! Exact integer semantics of sieve terms.
//!
//! A sieve term is a periodic marker that starts at an anchor and zero-crosses
//! the anchor's multiples further along the number line. The full variant has
//! period `anchor` and crosses every multiple `k * anchor` with `k >= 2`. The
//! odd-only variant doubles the period to `2 * anchor`, so only the odd
//! multiples `k * anchor` with odd `k >= 3` are crossed; its extrema sit on
//! the even multiples.
//!
//! Everything here is integer arithmetic. The sinusoids only exist in
//! [`crate::plot`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Period family of a sieve term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Period equal to the anchor; crosses all multiples.
    Full,
    /// Period doubled; crosses odd multiples only.
    OddOnly,
}

/// Where a construction places its terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpawnRule {
    /// A term starts only at a number no earlier term has crossed.
    #[serde(rename = "case_i")]
    CaseI,
    /// A term starts at every eligible number, crossed or not.
    #[serde(rename = "case_ii")]
    CaseII,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Full => "full",
            Variant::OddOnly => "odd-only",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Variant::Full),
            "odd-only" | "odd_only" | "odd" => Ok(Variant::OddOnly),
            other => Err(Error::config(format!("unknown variant {other:?}"))),
        }
    }
}

impl fmt::Display for SpawnRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpawnRule::CaseI => "case1",
            SpawnRule::CaseII => "case2",
        })
    }
}

impl FromStr for SpawnRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "case1" | "case_i" | "i" => Ok(SpawnRule::CaseI),
            "case2" | "case_ii" | "ii" => Ok(SpawnRule::CaseII),
            other => Err(Error::config(format!("unknown spawn rule {other:?}"))),
        }
    }
}

/// One periodic marker. Construct through [`SieveTerm::new`], which enforces
/// the odd-only anchor restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SieveTerm {
    anchor: u64,
    variant: Variant,
}

impl SieveTerm {
    pub fn new(anchor: u64, variant: Variant) -> Result<Self> {
        if anchor < 2 {
            return Err(Error::config(format!(
                "term anchor must be >= 2, got {anchor}"
            )));
        }
        if variant == Variant::OddOnly && anchor % 2 == 0 {
            return Err(Error::config(format!(
                "odd-only terms need an odd anchor >= 3, got {anchor}"
            )));
        }
        Ok(SieveTerm { anchor, variant })
    }

    pub fn full(anchor: u64) -> Result<Self> {
        Self::new(anchor, Variant::Full)
    }

    pub fn odd_only(anchor: u64) -> Result<Self> {
        Self::new(anchor, Variant::OddOnly)
    }

    #[inline]
    pub fn anchor(&self) -> u64 {
        self.anchor
    }

    #[inline]
    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Period in integer units: `anchor` for full terms, `2 * anchor` for
    /// odd-only terms.
    #[inline]
    pub fn period_units(&self) -> u64 {
        match self.variant {
            Variant::Full => self.anchor,
            Variant::OddOnly => self.anchor.saturating_mul(2),
        }
    }

    /// Smallest number this term crosses, saturating at `u64::MAX`.
    #[inline]
    pub fn first_crossing(&self) -> u64 {
        match self.variant {
            Variant::Full => self.anchor.saturating_mul(2),
            Variant::OddOnly => self.anchor.saturating_mul(3),
        }
    }

    /// Distance between consecutive crossings.
    #[inline]
    pub fn crossing_stride(&self) -> u64 {
        self.period_units()
    }

    /// Every number in `[2, bound]` this term crosses, ascending.
    pub fn crossings(&self, bound: u64) -> impl Iterator<Item = u64> {
        let factor = match self.variant {
            Variant::Full => 2,
            Variant::OddOnly => 3,
        };
        let stride = self.crossing_stride();
        let mut next = self
            .anchor
            .checked_mul(factor)
            .filter(|&first| first <= bound);
        std::iter::from_fn(move || {
            let n = next?;
            next = n.checked_add(stride).filter(|&m| m <= bound);
            Some(n)
        })
    }
}

impl fmt::Display for SieveTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.variant {
            Variant::Full => write!(f, "{a} + sin(1/{a})", a = self.anchor),
            Variant::OddOnly => write!(f, "{} + sin(1/{})", self.anchor, 2 * self.anchor),
        }
    }
}

/// Does `term` zero-cross `n`?
///
/// Full: `anchor | n` and `n >= 2 * anchor`. Odd-only: `anchor | n`, the
/// quotient is odd, and `n >= 3 * anchor`. A term never crosses its own
/// anchor.
#[inline]
pub fn zero_cross(term: SieveTerm, n: u64) -> bool {
    let a = term.anchor;
    if n % a != 0 {
        return false;
    }
    let q = n / a;
    match term.variant {
        Variant::Full => q >= 2,
        Variant::OddOnly => q >= 3 && q % 2 == 1,
    }
}

/// A set of sieve terms over `[2, bound]` together with the rule that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveConstruction {
    variant: Variant,
    rule: SpawnRule,
    bound: u64,
    odd_primes_only: bool,
    anchor_limit: u64,
    anchors: Vec<u64>,
}

/// Serializable summary of a construction, used in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionDescriptor {
    pub variant: Variant,
    pub rule: SpawnRule,
    pub bound: u64,
    pub odd_primes_only: bool,
    pub anchor_limit: u64,
    pub term_count: u64,
}

impl SieveConstruction {
    #[inline]
    pub fn variant(&self) -> Variant {
        self.variant
    }

    #[inline]
    pub fn rule(&self) -> SpawnRule {
        self.rule
    }

    #[inline]
    pub fn bound(&self) -> u64 {
        self.bound
    }

    #[inline]
    pub fn odd_primes_only(&self) -> bool {
        self.odd_primes_only
    }

    /// Largest anchor the construction admits. Equals `bound` unless the
    /// construction was cut down with [`SieveConstruction::prefix`].
    #[inline]
    pub fn anchor_limit(&self) -> u64 {
        self.anchor_limit
    }

    /// Term anchors, strictly increasing.
    #[inline]
    pub fn anchors(&self) -> &[u64] {
        &self.anchors
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = SieveTerm> + '_ {
        let variant = self.variant;
        self.anchors
            .iter()
            .map(move |&anchor| SieveTerm { anchor, variant })
    }

    pub fn contains_anchor(&self, anchor: u64) -> bool {
        self.anchors.binary_search(&anchor).is_ok()
    }

    /// The same construction restricted to terms with anchor `<= max_anchor`.
    /// This is the state of the progression once it has advanced to
    /// `max_anchor`.
    pub fn prefix(&self, max_anchor: u64) -> SieveConstruction {
        let limit = max_anchor.min(self.anchor_limit);
        let cut = self.anchors.partition_point(|&a| a <= limit);
        SieveConstruction {
            anchor_limit: limit,
            anchors: self.anchors[..cut].to_vec(),
            ..*self
        }
    }

    pub fn descriptor(&self) -> ConstructionDescriptor {
        ConstructionDescriptor {
            variant: self.variant,
            rule: self.rule,
            bound: self.bound,
            odd_primes_only: self.odd_primes_only,
            anchor_limit: self.anchor_limit,
            term_count: self.anchors.len() as u64,
        }
    }
}

/// Builds the construction for `variant` and `rule` over `[2, bound]`.
///
/// Anchors are considered in ascending order. Under Case I an anchor gets a
/// term only if no earlier term crosses it; under Case II every eligible
/// anchor gets one (every `n >= 2` for full, every odd `n >= 3` for
/// odd-only). `odd_primes_only` drops the anchor-2 term from a full
/// construction and is rejected for odd-only constructions.
///
/// This is inherently sequential: whether `a` spawns under Case I depends on
/// every term spawned before it.
pub fn spawn_construction(
    variant: Variant,
    rule: SpawnRule,
    bound: u64,
    odd_primes_only: bool,
) -> Result<SieveConstruction> {
    if bound < 2 {
        return Err(Error::config(format!(
            "construction bound must be >= 2, got {bound}"
        )));
    }
    if odd_primes_only && variant == Variant::OddOnly {
        return Err(Error::config(
            "odd_primes_only only applies to the full variant; odd-only constructions never hold anchor 2",
        ));
    }
    let first = match variant {
        Variant::Full => 2,
        Variant::OddOnly => 3,
    };
    let step = match variant {
        Variant::Full => 1,
        Variant::OddOnly => 2,
    };
    let eligible = (first..=bound).step_by(step);

    let mut anchors: Vec<u64> = match rule {
        SpawnRule::CaseII => eligible.collect(),
        SpawnRule::CaseI => {
            // Every term that could cross `a` has anchor <= a / 2 and is
            // already spawned by the time `a` is reached, so marking each new
            // term's crossings eagerly answers "crossed by an earlier term".
            let mut crossed = vec![0u64; (bound as usize >> 6) + 1];
            let mut out = Vec::new();
            for a in eligible {
                let (w, b) = ((a >> 6) as usize, a & 63);
                if crossed[w] >> b & 1 == 1 {
                    continue;
                }
                out.push(a);
                let term = SieveTerm { anchor: a, variant };
                for m in term.crossings(bound) {
                    crossed[(m >> 6) as usize] |= 1 << (m & 63);
                }
            }
            out
        }
    };
    if odd_primes_only {
        anchors.retain(|&a| a != 2);
    }
    Ok(SieveConstruction {
        variant,
        rule,
        bound,
        odd_primes_only,
        anchor_limit: bound,
        anchors,
    })
}

/// Anchors of `construction` whose terms zero-cross `n`, ascending. Empty
/// means `n` survives.
pub fn crossers_of(construction: &SieveConstruction, n: u64) -> Result<Vec<u64>> {
    if n < 2 || n > construction.bound {
        return Err(Error::OutOfRange {
            n,
            lo: 2,
            hi: construction.bound,
        });
    }
    let mut low = Vec::new();
    let mut high = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            low.push(d);
            if d != n / d {
                high.push(n / d);
            }
        }
        d += 1;
    }
    high.reverse();
    Ok(low
        .into_iter()
        .chain(high)
        .filter(|&a| a >= 2 && construction.contains_anchor(a))
        .filter(|&a| {
            zero_cross(
                SieveTerm {
                    anchor: a,
                    variant: construction.variant,
                },
                n,
            )
        })
        .collect())
}
