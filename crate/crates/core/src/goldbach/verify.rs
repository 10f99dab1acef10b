use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::checkpoint::{CheckpointLog, CheckpointRecord};
use super::{count_representations_unchecked, decompose_weak_unchecked, REPRESENTATION_LIMIT};
use crate::engine::ClassificationTable;
use crate::error::{Error, Result};

/// Odd numbers verified between checkpoints.
pub const DEFAULT_CHECKPOINT_EVERY: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub lo: u64,
    pub hi: u64,
    pub checkpoint_path: Option<PathBuf>,
    /// Odd numbers per checkpoint block.
    pub checkpoint_every: u64,
    pub workers: usize,
    /// Track min/max representation counts. Needs `hi <= 10^6` and cannot be
    /// combined with checkpointing, since the log does not carry them.
    pub representation_stats: bool,
}

impl VerifyConfig {
    pub fn new(lo: u64, hi: u64) -> Self {
        VerifyConfig {
            lo,
            hi,
            checkpoint_path: None,
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            representation_stats: false,
        }
    }

    pub fn checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint_path = Some(path.into());
        self
    }

    pub fn every(mut self, checkpoint_every: u64) -> Self {
        self.checkpoint_every = checkpoint_every;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// Identifies a run by everything that affects its result. Worker count and
/// file paths do not affect results, so they are left out.
pub fn verify_fingerprint(
    lo: u64,
    hi: u64,
    checkpoint_every: u64,
    representation_stats: bool,
) -> String {
    let canonical = format!(
        "hsv-verify/1;lo={lo};hi={hi};every={checkpoint_every};stats={representation_stats}"
    );
    let digest = Sha256::digest(canonical.as_bytes());
    hex::encode(&digest[..8])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lo: u64,
    pub hi: u64,
    pub verified_count: u64,
    pub failures: Vec<u64>,
    pub success: bool,
    pub min_representations: Option<u64>,
    pub max_representations: Option<u64>,
    pub wall_time_secs: f64,
    pub fingerprint: String,
    pub checkpoint_lineage: Vec<CheckpointRecord>,
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One row per failure; the header is always present.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n\n");
        for n in &self.failures {
            s.push_str(&format!("{n}\n"));
        }
        s
    }

    /// Copy with the timing zeroed, for comparing runs.
    pub fn without_wall_time(&self) -> Self {
        VerificationReport {
            wall_time_secs: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Completed(VerificationReport),
    /// Stopped on request after writing checkpoints; resume with the same
    /// configuration.
    Halted {
        lineage: Vec<CheckpointRecord>,
    },
}

/// Verifies that every odd `n` in `[max(lo, 9), hi]` has an odd-prime
/// triple. A counterexample stops the run and is reported in `failures`.
pub fn verify_range(cfg: &VerifyConfig, table: &ClassificationTable) -> Result<VerificationReport> {
    match verify_range_until(cfg, table, None)? {
        RunOutcome::Completed(report) => Ok(report),
        RunOutcome::Halted { .. } => unreachable!("no halt requested"),
    }
}

struct Plan {
    first: u64,
    total: u64,
    every: u64,
    blocks: u64,
}

impl Plan {
    fn block(&self, k: u64) -> (u64, u64) {
        let start = self.first + 2 * self.every * k;
        let count = self.every.min(self.total - self.every * k);
        (start, count)
    }

    fn block_last(&self, k: u64) -> u64 {
        let (start, count) = self.block(k);
        start + 2 * (count - 1)
    }
}

#[derive(Debug)]
struct BlockResult {
    verified: u64,
    counterexample: Option<u64>,
    reps: Option<(u64, u64)>,
}

fn run_block(plan: &Plan, k: u64, table: &ClassificationTable, stats: bool) -> Result<BlockResult> {
    let (start, count) = plan.block(k);
    let mut out = BlockResult {
        verified: 0,
        counterexample: None,
        reps: None,
    };
    for i in 0..count {
        let n = start + 2 * i;
        match decompose_weak_unchecked(n, table) {
            Ok(_) => out.verified += 1,
            Err(Error::NoTripleFound(n)) => {
                out.counterexample = Some(n);
                break;
            }
            Err(e) => return Err(e),
        }
        if stats {
            let c = count_representations_unchecked(n, table);
            out.reps = Some(match out.reps {
                None => (c, c),
                Some((lo, hi)) => (lo.min(c), hi.max(c)),
            });
        }
    }
    Ok(out)
}

fn sentinel_path(checkpoint: &Path) -> PathBuf {
    let mut s = checkpoint.as_os_str().to_owned();
    s.push(".counterexample");
    PathBuf::from(s)
}

/// Like [`verify_range`], but stops after writing `halt_after` new
/// checkpoints in this invocation. Used to exercise resumption.
pub fn verify_range_until(
    cfg: &VerifyConfig,
    table: &ClassificationTable,
    halt_after: Option<u64>,
) -> Result<RunOutcome> {
    let started = Instant::now();
    if cfg.checkpoint_every == 0 {
        return Err(Error::config("checkpoint interval must be >= 1"));
    }
    if cfg.lo > cfg.hi {
        return Err(Error::config(format!(
            "empty range [{}, {}]",
            cfg.lo, cfg.hi
        )));
    }
    let first = cfg.lo.max(9) | 1;
    let last = if cfg.hi % 2 == 0 { cfg.hi - 1 } else { cfg.hi };
    if first > last {
        return Err(Error::config(format!(
            "[{}, {}] holds no odd number greater than 7",
            cfg.lo, cfg.hi
        )));
    }
    if last > table.bound() {
        return Err(Error::OutOfRange {
            n: last,
            lo: 2,
            hi: table.bound(),
        });
    }
    if cfg.representation_stats {
        if cfg.checkpoint_path.is_some() {
            return Err(Error::config(
                "representation stats cannot be combined with checkpointing",
            ));
        }
        if last > REPRESENTATION_LIMIT {
            return Err(Error::Complexity(format!(
                "representation stats are limited to hi <= {REPRESENTATION_LIMIT}"
            )));
        }
    }

    let total = (last - first) / 2 + 1;
    let plan = Plan {
        first,
        total,
        every: cfg.checkpoint_every,
        blocks: total.div_ceil(cfg.checkpoint_every),
    };
    let fingerprint = verify_fingerprint(
        cfg.lo,
        cfg.hi,
        cfg.checkpoint_every,
        cfg.representation_stats,
    );

    let (mut log, prior) = match &cfg.checkpoint_path {
        Some(path) => {
            let (log, prior) = CheckpointLog::open(path, &fingerprint)?;
            (Some(log), prior)
        }
        None => (None, Vec::new()),
    };
    let mut cumulative = 0;
    for (i, r) in prior.iter().enumerate() {
        let k = i as u64;
        if k >= plan.blocks {
            return Err(Error::config(
                "checkpoint log has more blocks than the range",
            ));
        }
        cumulative += plan.block(k).1;
        if r.last_n != plan.block_last(k) || r.verified_count != cumulative {
            return Err(Error::Corrupt {
                kind: "checkpoint",
                path: cfg.checkpoint_path.clone().unwrap_or_default(),
                reason: format!(
                    "record {} does not match the block layout of this run",
                    r.seq
                ),
            });
        }
    }
    let mut lineage = prior;
    let start_block = lineage.len() as u64;

    let stop = AtomicBool::new(false);
    let next = AtomicU64::new(start_block);
    let workers = cfg.workers.max(1);
    let stats = cfg.representation_stats;

    enum End {
        Done,
        Halted,
        Counterexample(u64),
    }

    let mut reps: Option<(u64, u64)> = None;
    let end: Result<End> = std::thread::scope(|s| {
        let (tx, rx) = mpsc::channel::<(u64, Result<BlockResult>)>();
        for _ in 0..workers {
            let tx = tx.clone();
            let (plan, stop, next) = (&plan, &stop, &next);
            s.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= plan.blocks {
                    break;
                }
                if tx.send((k, run_block(plan, k, table, stats))).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        // Single owner of the frontier: blocks are committed strictly in
        // order, whatever order the workers finish them in.
        let mut pending = BTreeMap::new();
        let mut frontier = start_block;
        let mut written = 0u64;
        let result = (|| -> Result<End> {
            if halt_after == Some(0) && frontier < plan.blocks {
                return Ok(End::Halted);
            }
            for (k, r) in rx.iter() {
                pending.insert(k, r);
                while let Some(r) = pending.remove(&frontier) {
                    let r = r?;
                    cumulative += r.verified;
                    if let Some((lo, hi)) = r.reps {
                        reps = Some(match reps {
                            None => (lo, hi),
                            Some((a, b)) => (a.min(lo), b.max(hi)),
                        });
                    }
                    if let Some(n) = r.counterexample {
                        return Ok(End::Counterexample(n));
                    }
                    let record = CheckpointRecord {
                        seq: frontier + 1,
                        last_n: plan.block_last(frontier),
                        verified_count: cumulative,
                    };
                    if let Some(log) = log.as_mut() {
                        log.append(&record)?;
                    }
                    lineage.push(record);
                    written += 1;
                    frontier += 1;
                    if frontier < plan.blocks && halt_after.is_some_and(|h| written >= h) {
                        return Ok(End::Halted);
                    }
                }
            }
            Ok(End::Done)
        })();
        stop.store(true, Ordering::Relaxed);
        drop(rx);
        result
    });

    let failures = match end? {
        End::Halted => return Ok(RunOutcome::Halted { lineage }),
        End::Done => Vec::new(),
        End::Counterexample(n) => {
            if let Some(path) = &cfg.checkpoint_path {
                std::fs::write(sentinel_path(path), format!("{n}\n"))?;
            }
            vec![n]
        }
    };
    Ok(RunOutcome::Completed(VerificationReport {
        lo: cfg.lo,
        hi: cfg.hi,
        verified_count: cumulative,
        success: failures.is_empty(),
        failures,
        min_representations: reps.map(|r| r.0),
        max_representations: reps.map(|r| r.1),
        wall_time_secs: started.elapsed().as_secs_f64(),
        fingerprint,
        checkpoint_lineage: lineage,
    }))
}
