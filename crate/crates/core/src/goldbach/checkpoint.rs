//! Line-delimited checkpoint log: one `seq,last_n,verified_count,fingerprint`
//! record per completed block.
//!
//! A run killed mid-write can leave a final line without its newline; that
//! line is dropped on read and rewritten away before appending.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub seq: u64,
    pub last_n: u64,
    pub verified_count: u64,
}

fn corrupt(path: &Path, reason: String) -> Error {
    Error::Corrupt {
        kind: "checkpoint",
        path: path.to_path_buf(),
        reason,
    }
}

/// Reads every complete record in `path` together with its fingerprint.
/// A missing file yields no records.
pub fn read_checkpoints(path: &Path) -> Result<Vec<(CheckpointRecord, String)>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let complete = match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    };
    let mut out: Vec<(CheckpointRecord, String)> = Vec::new();
    for (lineno, line) in complete.lines().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let [seq, last_n, verified, fingerprint] = fields.as_slice() else {
            return Err(corrupt(
                path,
                format!("line {}: expected 4 fields", lineno + 1),
            ));
        };
        let parse = |s: &str| {
            s.parse::<u64>()
                .map_err(|e| corrupt(path, format!("line {}: {e}", lineno + 1)))
        };
        let record = CheckpointRecord {
            seq: parse(seq)?,
            last_n: parse(last_n)?,
            verified_count: parse(verified)?,
        };
        let expected_seq = out.last().map_or(1, |(r, _)| r.seq + 1);
        if record.seq != expected_seq {
            return Err(corrupt(
                path,
                format!(
                    "line {}: sequence {} follows {}",
                    lineno + 1,
                    record.seq,
                    expected_seq - 1
                ),
            ));
        }
        out.push((record, fingerprint.to_string()));
    }
    Ok(out)
}

/// Append-only writer for one run's checkpoint log.
#[derive(Debug)]
pub struct CheckpointLog {
    path: PathBuf,
    fingerprint: String,
    file: File,
}

impl CheckpointLog {
    /// Opens `path` for the run identified by `fingerprint`, returning the
    /// records already on disk. Records from a different run are rejected.
    pub fn open(path: &Path, fingerprint: &str) -> Result<(Self, Vec<CheckpointRecord>)> {
        let existing = read_checkpoints(path)?;
        if let Some((_, other)) = existing.iter().find(|(_, f)| f != fingerprint) {
            return Err(Error::config(format!(
                "checkpoint {} belongs to a different run (fingerprint {other}, expected {fingerprint})",
                path.display()
            )));
        }
        let records: Vec<CheckpointRecord> = existing.into_iter().map(|(r, _)| r).collect();

        // Rewrite only the complete records so a torn tail line is gone.
        let mut body = String::new();
        for r in &records {
            body.push_str(&format_record(r, fingerprint));
        }
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, body)?;
        fs::rename(&tmp, path)?;

        let file = OpenOptions::new().append(true).open(path)?;
        Ok((
            CheckpointLog {
                path: path.to_path_buf(),
                fingerprint: fingerprint.to_string(),
                file,
            },
            records,
        ))
    }

    pub fn append(&mut self, record: &CheckpointRecord) -> Result<()> {
        self.file
            .write_all(format_record(record, &self.fingerprint).as_bytes())?;
        self.file.sync_data()?;
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

fn format_record(r: &CheckpointRecord, fingerprint: &str) -> String {
    format!(
        "{},{},{},{}\n",
        r.seq, r.last_n, r.verified_count, fingerprint
    )
}
