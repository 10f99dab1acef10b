//! HSV1 prime-cache files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! offset 0   4 bytes   magic "HSV1"
//! offset 4   1 byte    version (1)
//! offset 5   8 bytes   bound
//! offset 13  8 * W     odd-index composite words, W = ceil(ceil(bound / 2) / 64)
//! ```
//!
//! Bit `i` of the word stream is the odd number `2i + 1`; 1 means composite.
//! The bit for 1 and the padding past `bound` are zero.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{odd_word_count, ClassificationTable, Evens, Provenance};
use crate::error::{Error, Result};

pub const CACHE_MAGIC: &[u8; 4] = b"HSV1";
pub const CACHE_VERSION: u8 = 1;
const HEADER_LEN: usize = 13;

pub fn write_cache_to<W: Write>(table: &ClassificationTable, mut w: W) -> Result<()> {
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&[CACHE_VERSION])?;
    w.write_all(&table.bound().to_le_bytes())?;
    for word in table.odd_words() {
        w.write_all(&word.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the odd composite flags of `table`. Every construction marks odd
/// numbers the same way, so the file always reads back as a prime table.
pub fn write_cache(table: &ClassificationTable, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    write_cache_to(table, BufWriter::new(file))
}

pub fn read_cache(path: &Path) -> Result<ClassificationTable> {
    let file = File::open(path)?;
    read_cache_from(BufReader::new(file)).map_err(|e| match e {
        Error::Corrupt { kind, reason, .. } => Error::Corrupt {
            kind,
            path: path.to_path_buf(),
            reason,
        },
        other => other,
    })
}

pub fn read_cache_from<R: Read>(mut r: R) -> Result<ClassificationTable> {
    let corrupt = |reason: String| Error::Corrupt {
        kind: "HSV1 cache",
        path: Default::default(),
        reason,
    };
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|_| corrupt("truncated header".into()))?;
    if &header[..4] != CACHE_MAGIC {
        return Err(corrupt(format!("bad magic {:?}", &header[..4])));
    }
    if header[4] != CACHE_VERSION {
        return Err(corrupt(format!("unsupported version {}", header[4])));
    }
    let bound = u64::from_le_bytes(header[5..13].try_into().unwrap());
    if bound < 2 {
        return Err(corrupt(format!("bound {bound} < 2")));
    }
    let words = odd_word_count(bound);
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != words * 8 {
        return Err(corrupt(format!(
            "expected {} payload bytes for bound {bound}, found {}",
            words * 8,
            payload.len()
        )));
    }
    let odd: Vec<u64> = payload
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if odd[0] & 1 != 0 {
        return Err(corrupt("bit for 1 is set".into()));
    }
    let used = bound.div_ceil(2) % 64;
    if used != 0 && odd[words - 1] >> used != 0 {
        return Err(corrupt("padding bits past bound are set".into()));
    }
    Ok(ClassificationTable::from_parts(
        bound,
        odd,
        Evens::Standard,
        Provenance::Cache,
    ))
}
