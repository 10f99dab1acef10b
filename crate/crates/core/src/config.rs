//! Run configuration shared by the CLI subcommands.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::DEFAULT_MEMORY_BUDGET;
use crate::error::{Error, Result};
use crate::numberline::{SpawnRule, Variant};

/// Which engine produces a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Oracle {
    Classical,
    HarmonicCase1,
    HarmonicCase2,
}

impl Oracle {
    pub fn spawn_rule(&self) -> Option<SpawnRule> {
        match self {
            Oracle::Classical => None,
            Oracle::HarmonicCase1 => Some(SpawnRule::CaseI),
            Oracle::HarmonicCase2 => Some(SpawnRule::CaseII),
        }
    }
}

impl fmt::Display for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Oracle::Classical => "classical",
            Oracle::HarmonicCase1 => "harmonic-case1",
            Oracle::HarmonicCase2 => "harmonic-case2",
        })
    }
}

impl FromStr for Oracle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Oracle::Classical),
            "harmonic-case1" => Ok(Oracle::HarmonicCase1),
            "harmonic-case2" => Ok(Oracle::HarmonicCase2),
            other => Err(Error::config(format!("unknown oracle {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub bound: Option<u64>,
    pub lo: Option<u64>,
    pub hi: Option<u64>,
    pub variant: Option<Variant>,
    pub oracle: Option<Oracle>,
    #[serde(default)]
    pub odd_primes_only: bool,
    pub segment: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    pub memory_budget: u64,
    pub workers: Option<usize>,
    #[serde(default)]
    pub format: Format,
    pub cache: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: impl Into<String>) -> Self {
        RunConfig {
            command: command.into(),
            bound: None,
            lo: None,
            hi: None,
            variant: None,
            oracle: None,
            odd_primes_only: false,
            segment: None,
            seed: 0,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            workers: None,
            format: Format::Json,
            cache: None,
            output: None,
        }
    }

    /// TOML rendering; [`RunConfig::from_text`] parses it back unchanged.
    pub fn to_text(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(format!("serializing config: {e}")))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("parsing config: {e}")))
    }

    /// Hash of the fields that change results. Paths, output format, worker
    /// count and memory budget are excluded, and the encoding uses only
    /// integers and fixed strings, so the value is the same on every platform.
    pub fn fingerprint(&self) -> String {
        let opt = |v: Option<u64>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
        let canonical = format!(
            "hsv-run/1;command={};bound={};lo={};hi={};variant={};oracle={};odd_primes_only={};segment={};seed={}",
            self.command,
            opt(self.bound),
            opt(self.lo),
            opt(self.hi),
            self.variant.map_or_else(|| "-".to_string(), |v| v.to_string()),
            self.oracle.map_or_else(|| "-".to_string(), |o| o.to_string()),
            self.odd_primes_only,
            opt(self.segment),
            self.seed,
        );
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// Parses a byte count with an optional binary suffix (`K`, `M`, `G`, `T`,
/// optionally followed by `iB` or `B`).
pub fn parse_byte_size(s: &str) -> Result<u64> {
    let t = s.trim();
    let digits_end = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
    let (digits, suffix) = t.split_at(digits_end);
    let value: u64 = digits
        .parse()
        .map_err(|_| Error::config(format!("invalid byte size {s:?}")))?;
    let shift = match suffix.trim().to_ascii_uppercase().as_str() {
        "" | "B" => 0,
        "K" | "KB" | "KIB" => 10,
        "M" | "MB" | "MIB" => 20,
        "G" | "GB" | "GIB" => 30,
        "T" | "TB" | "TIB" => 40,
        _ => return Err(Error::config(format!("invalid byte size suffix in {s:?}"))),
    };
    value
        .checked_mul(1 << shift)
        .ok_or_else(|| Error::config(format!("byte size {s:?} overflows")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fingerprint_is_pinned() {
        let mut cfg = RunConfig::new("verify");
        cfg.lo = Some(9);
        cfg.hi = Some(99);
        // sha256("hsv-run/1;command=verify;bound=-;lo=9;hi=99;variant=-;oracle=-;odd_primes_only=false;segment=-;seed=0")
        assert_eq!(
            cfg.fingerprint(),
            "f5a0203e0cc6b58002e8c93b1cffd26eff74f2637fbe7f6f2d4afbbb12568b28"
        );
        let mut other = cfg.clone();
        other.workers = Some(8);
        other.output = Some("x.json".into());
        other.format = Format::Csv;
        assert_eq!(other.fingerprint(), cfg.fingerprint());
        other.hi = Some(101);
        assert_ne!(other.fingerprint(), cfg.fingerprint());
    }

    #[test]
    fn byte_sizes() {
        assert_eq!(parse_byte_size("1024").unwrap(), 1024);
        assert_eq!(parse_byte_size("2G").unwrap(), 2 << 30);
        assert_eq!(parse_byte_size("64MiB").unwrap(), 64 << 20);
        assert_eq!(parse_byte_size("3 kb").unwrap(), 3 << 10);
        assert!(parse_byte_size("G").is_err());
        assert!(parse_byte_size("12Q").is_err());
        assert!(parse_byte_size("99999999999T").is_err());
    }

    fn variant() -> impl Strategy<Value = Option<Variant>> {
        prop_oneof![
            Just(None),
            Just(Some(Variant::Full)),
            Just(Some(Variant::OddOnly))
        ]
    }

    fn oracle() -> impl Strategy<Value = Option<Oracle>> {
        prop_oneof![
            Just(None),
            Just(Some(Oracle::Classical)),
            Just(Some(Oracle::HarmonicCase1)),
            Just(Some(Oracle::HarmonicCase2))
        ]
    }

    proptest! {
        #[test]
        fn text_round_trip(
            command in "[a-z]{1,8}",
            bound in proptest::option::of(2u64..u64::MAX / 2),
            lo in proptest::option::of(any::<u32>()),
            hi in proptest::option::of(any::<u32>()),
            variant in variant(),
            oracle in oracle(),
            odd_primes_only in any::<bool>(),
            seed in any::<u32>(),
            workers in proptest::option::of(1usize..64),
            cache in proptest::option::of("[a-z/]{1,12}"),
        ) {
            let cfg = RunConfig {
                command,
                bound,
                lo: lo.map(u64::from),
                hi: hi.map(u64::from),
                variant,
                oracle,
                odd_primes_only,
                segment: None,
                seed: u64::from(seed),
                memory_budget: DEFAULT_MEMORY_BUDGET,
                workers,
                format: Format::Text,
                cache: cache.map(PathBuf::from),
                output: None,
            };
            let text = cfg.to_text().unwrap();
            let back = RunConfig::from_text(&text).unwrap();
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(back.fingerprint(), cfg.fingerprint());
        }
    }
}
