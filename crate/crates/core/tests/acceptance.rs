//! Acceptance gate. Each criterion prints one `PASS`/`FAIL` line with its
//! elapsed time, and the process exits non-zero if any criterion fails.
//!
//! Time limits are part of the criteria and are checked, not just reported.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use harmonic_sieve::engine::{read_cache_from, write_cache_to};
use harmonic_sieve::equivalence::{compare_constructions, powers_of_two_residue};
use harmonic_sieve::goldbach::{
    decompose_weak, three_odds_sum_property, verify_range, verify_range_until, RunOutcome,
    VerifyConfig,
};
use harmonic_sieve::plot::{figure_construction, render_predefined, FigureId, PlotSpec};
use harmonic_sieve::{
    classical_sieve, crossers_of, materialize, read_cache, spawn_construction, write_cache, Class,
    SpawnRule, Variant,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn trial_division_primes(bound: u64) -> Vec<bool> {
    (0..=bound)
        .map(|n| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .collect()
}

fn seed() -> u64 {
    std::env::var("HSV_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn oracle_equivalence() -> Outcome {
    let t0 = Instant::now();
    for exp in 2..=5 {
        let bound = 10u64.pow(exp);
        let is_prime = trial_division_primes(bound);
        let harmonic = materialize(
            &spawn_construction(Variant::Full, SpawnRule::CaseI, bound, false).map_err(e)?,
        )
        .map_err(e)?;
        let classical = classical_sieve(bound).map_err(e)?;
        for n in 2..=bound {
            let expected = if is_prime[n as usize] {
                Class::Survivor
            } else {
                Class::Crossed
            };
            let h = harmonic.class(n).map_err(e)?;
            let c = classical.class(n).map_err(e)?;
            ensure(h == expected && c == expected, || {
                format!("B={bound}, n={n}: harmonic {h:?}, classical {c:?}, trial division {expected:?}")
            })?;
        }
    }
    within(t0.elapsed(), Duration::from_secs(5))?;
    Ok("B in {10^2, 10^3, 10^4, 10^5}".into())
}

fn case_equivalence() -> Outcome {
    let t0 = Instant::now();
    for variant in [Variant::Full, Variant::OddOnly] {
        let r = compare_constructions(variant, 100_000, false).map_err(e)?;
        ensure(r.crossed_sets_equal && r.survivor_sets_equal, || {
            format!(
                "{variant}: crossed {}, survivors {}, first divergence {:?}",
                r.crossed_sets_equal, r.survivor_sets_equal, r.first_divergence
            )
        })?;
    }
    within(t0.elapsed(), Duration::from_secs(10))?;
    Ok("full and odd-only at B=10^5".into())
}

fn residue() -> Outcome {
    let t0 = Instant::now();
    let got = powers_of_two_residue(1_000_000).map_err(e)?;
    let expected: Vec<u64> = (2..=19).map(|m| 1u64 << m).collect();
    ensure(got == expected, || format!("got {got:?}"))?;
    within(t0.elapsed(), Duration::from_secs(5))?;
    Ok("{4, 8, ..., 2^19} at B=10^6".into())
}

fn desk_scale_run() -> Outcome {
    let t0 = Instant::now();
    let hi = 10_000_000;
    let table = classical_sieve(hi).map_err(e)?;
    let report = verify_range(&VerifyConfig::new(9, hi), &table).map_err(e)?;
    ensure(report.success && report.failures.is_empty(), || {
        format!("failures {:?}", report.failures)
    })?;
    ensure(report.verified_count == 4_999_996, || {
        format!("verified {}", report.verified_count)
    })?;
    within(t0.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "[9, 10^7], {} odd n verified",
        report.verified_count
    ))
}

fn decomposition_agreement() -> Outcome {
    let t0 = Instant::now();
    let hi = 10_000u64;
    let is_prime = trial_division_primes(hi);
    let odd_primes: Vec<u64> = (3..=hi)
        .step_by(2)
        .filter(|&p| is_prime[p as usize])
        .collect();
    let table = classical_sieve(hi).map_err(e)?;
    for n in (9..=hi).step_by(2) {
        // Walk all triples in lexicographic order; the first hit is the minimum.
        let mut brute = None;
        'outer: for (i, &a) in odd_primes.iter().enumerate() {
            for &b in &odd_primes[i..] {
                if a + b >= n {
                    break;
                }
                let c = n - a - b;
                if c >= b && c % 2 == 1 && is_prime[c as usize] {
                    brute = Some([a, b, c]);
                    break 'outer;
                }
            }
        }
        let got = decompose_weak(n, &table).map_err(e)?.primes();
        ensure(brute == Some(got), || {
            format!("n={n}: decompose_weak {got:?}, brute force {brute:?}")
        })?;
    }
    within(t0.elapsed(), Duration::from_secs(30))?;
    Ok("every odd n in [9, 10^4]".into())
}

fn corollary() -> Outcome {
    let t0 = Instant::now();
    ensure(three_odds_sum_property(1_000_000, 42).map_err(e)?, || {
        "a sample failed".into()
    })?;
    within(t0.elapsed(), Duration::from_secs(2))?;
    Ok("10^6 samples, seed 42".into())
}

fn strip_wall_time(mut v: Value) -> Value {
    v["wall_time_secs"] = Value::Null;
    v
}

/// Kills the CLI with SIGKILL at three random checkpoint counts, then
/// resumes to the end and compares the report with an uninterrupted run.
/// The library-level halt is exercised at three random points as well.
fn resume_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed());

    // Library level.
    let (lo, hi) = (9, 2_000_001);
    let table = classical_sieve(hi).map_err(e)?;
    let dir = tempfile::tempdir().map_err(e)?;
    let every = 4096;
    let plain = verify_range(&VerifyConfig::new(lo, hi).every(every), &table).map_err(e)?;
    let blocks = plain.checkpoint_lineage.len() as u64;
    let ckpt = dir.path().join("lib.ckpt");
    let cfg = VerifyConfig::new(lo, hi).every(every).checkpoint(&ckpt);
    let mut halts = Vec::new();
    for _ in 0..3 {
        let k = rng.gen_range(1..blocks / 4);
        halts.push(k);
        match verify_range_until(&cfg, &table, Some(k)).map_err(e)? {
            RunOutcome::Halted { .. } => {}
            RunOutcome::Completed(_) => return Err(format!("run finished before halt at +{k}")),
        }
    }
    let resumed = verify_range(&cfg, &table).map_err(e)?;
    ensure(
        resumed.without_wall_time() == plain.without_wall_time(),
        || format!("library resume after halts {halts:?} differs"),
    )?;

    // Process level.
    let hsv = env!("CARGO_BIN_EXE_hsv");
    let args = |extra: &[&str]| -> Vec<String> {
        let mut v: Vec<String> = [
            "verify",
            "--lo",
            "9",
            "--hi",
            "60000001",
            "--checkpoint-every",
            "32768",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        v.extend(extra.iter().map(|s| s.to_string()));
        v
    };
    let clean_path = dir.path().join("clean.json");
    let status = Command::new(hsv)
        .args(args(&["--output", clean_path.to_str().unwrap()]))
        .stdout(Stdio::null())
        .status()
        .map_err(e)?;
    ensure(status.success(), || {
        format!("uninterrupted run exited {status}")
    })?;
    let blocks = 30_000_000usize.div_ceil(32_768);

    // Kill when the log reaches three random, increasing line counts, so
    // every kill lands while the run is still going.
    let mut targets: Vec<usize> = (0..3).map(|_| rng.gen_range(1..blocks - 1)).collect();
    targets.sort_unstable();
    targets.dedup();
    while targets.len() < 3 {
        let t = targets.last().unwrap() + 1;
        targets.push(t);
    }
    let ckpt = dir.path().join("proc.ckpt");
    let out = dir.path().join("resumed.json");
    let resume_args = args(&[
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    let lines = || {
        fs::read_to_string(&ckpt)
            .map(|s| s.lines().count())
            .unwrap_or(0)
    };
    let mut kills = Vec::new();
    for &target in &targets {
        let mut child = Command::new(hsv)
            .args(&resume_args)
            .stdout(Stdio::null())
            .spawn()
            .map_err(e)?;
        while lines() < target {
            if child.try_wait().map_err(e)?.is_some() {
                return Err(format!("run finished before reaching checkpoint {target}"));
            }
            std::thread::sleep(Duration::from_micros(200));
        }
        child.kill().map_err(e)?;
        child.wait().map_err(e)?;
        let at = lines();
        ensure(at < blocks, || {
            format!("kill aimed at {target} landed after completion")
        })?;
        kills.push(at);
    }
    let status = Command::new(hsv)
        .args(&resume_args)
        .stdout(Stdio::null())
        .status()
        .map_err(e)?;
    ensure(status.success(), || format!("resumed run exited {status}"))?;
    let a: Value = serde_json::from_slice(&fs::read(&clean_path).map_err(e)?).map_err(e)?;
    let b: Value = serde_json::from_slice(&fs::read(&out).map_err(e)?).map_err(e)?;
    ensure(strip_wall_time(a) == strip_wall_time(b), || {
        format!("process resume after kills at {kills:?} differs")
    })?;
    Ok(format!(
        "halts at +{halts:?} blocks; SIGKILL at checkpoints {kills:?} of {blocks}"
    ))
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
}

fn marked_numbers(svg: &str) -> BTreeSet<u64> {
    svg.match_indices("data-n=\"")
        .map(|(i, m)| {
            let rest = &svg[i + m.len()..];
            rest[..rest.find('"').unwrap()].parse().unwrap()
        })
        .collect()
}

fn figures() -> Outcome {
    for id in FigureId::ALL {
        let spec = PlotSpec::for_figure(id);
        ensure(spec.x_range == (0.0, 40.0), || {
            format!("{}: x_range {:?}", id.slug(), spec.x_range)
        })?;
        let svg = render_predefined(&spec).map_err(e)?;
        let golden = fs::read(golden_dir().join(id.file_name())).map_err(e)?;
        ensure(golden == svg.as_bytes(), || {
            format!("{} differs from golden file", id.file_name())
        })?;

        let construction = figure_construction(id, 40).map_err(e)?;
        let mut exact = BTreeSet::new();
        for n in 2..=40 {
            if !crossers_of(&construction, n).map_err(e)?.is_empty() {
                exact.insert(n);
            }
        }
        let drawn = marked_numbers(&svg);
        ensure(drawn == exact, || {
            format!("{}: markers {drawn:?}, crossers {exact:?}", id.slug())
        })?;
    }
    Ok("11 figures byte-identical, markers match crossers on [0, 40]".into())
}

fn cache_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    for bound in [2, 3, 64, 127, 128, 129, 1_000, 1_000_000] {
        let classical = classical_sieve(bound).map_err(e)?;
        let path = dir.path().join(format!("b{bound}.hsv"));
        write_cache(&classical, &path).map_err(e)?;
        let back = read_cache(&path).map_err(e)?;
        let (p0, p1) = (
            classical.prime_count(bound).map_err(e)?,
            back.prime_count(bound).map_err(e)?,
        );
        ensure(p0 == p1, || {
            format!("B={bound}: prime_count {p0} before, {p1} after")
        })?;
        ensure(back.same_classification(&classical), || {
            format!("B={bound}: classification changed")
        })?;

        let harmonic = materialize(
            &spawn_construction(Variant::Full, SpawnRule::CaseI, bound, false).map_err(e)?,
        )
        .map_err(e)?;
        let mut hb = Vec::new();
        write_cache_to(&harmonic, &mut hb).map_err(e)?;
        let cb = fs::read(&path).map_err(e)?;
        ensure(hb == cb, || {
            format!("B={bound}: harmonic and classical cache bytes differ")
        })?;
        let again = read_cache_from(hb.as_slice()).map_err(e)?;
        ensure(again.odd_words() == classical.odd_words(), || {
            format!("B={bound}: words differ")
        })?;
    }
    Ok("bounds 2 through 10^6".into())
}

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("case equivalence", case_equivalence),
        ("powers-of-two residue", residue),
        ("weak Goldbach desk-scale run", desk_scale_run),
        ("decomposition oracle agreement", decomposition_agreement),
        ("three-odds corollary", corollary),
        ("resume equivalence", resume_equivalence),
        ("figure reproduction", figures),
        ("cache round-trip", cache_round_trip),
    ];
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (name, check) in criteria {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        let t0 = Instant::now();
        match check() {
            Ok(detail) => println!(
                "PASS  {name:<32} {:>9.3}s  {detail}",
                t0.elapsed().as_secs_f64()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL  {name:<32} {:>9.3}s  {why}",
                    t0.elapsed().as_secs_f64()
                );
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
