use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use harmonic_sieve::config::{parse_byte_size, Format, Oracle, RunConfig};
use harmonic_sieve::engine::DEFAULT_SEGMENT_LENGTH;
use harmonic_sieve::equivalence::compare_constructions_with;
use harmonic_sieve::goldbach::{
    three_odds_sum_property, verify_range_until, RunOutcome, VerifyConfig,
};
use harmonic_sieve::plot::{figure_construction, marker_set, render_figure, FigureId, PlotSpec};
use harmonic_sieve::{
    classical_sieve_with, materialize_with, read_cache, spawn_construction, write_cache,
    ClassificationTable, Error, SieveOptions, SpawnRule, Variant,
};

/// Exit status when a run stops at `--halt-after-checkpoints`.
const EXIT_HALTED: u8 = 130;

#[derive(Parser, Debug)]
#[command(
    name = "hsv",
    version,
    about = "Harmonic zero-cross sieves, Goldbach range checks and number-line figures"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format for the summary printed on stdout.
    #[arg(long, global = true, default_value = "json", value_parser = parse_format)]
    format: Format,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Memory budget for sieve tables, e.g. `512M` or `2GiB`.
    #[arg(long, global = true, env = "HSV_MEMORY_BUDGET", value_parser = parse_budget)]
    memory_budget: Option<u64>,
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sieve [2, bound], print a summary and optionally write an HSV1 cache.
    Sieve {
        #[arg(long, value_parser = parse_count)]
        bound: u64,
        #[arg(long)]
        cache_out: Option<PathBuf>,
        #[arg(long, default_value = "classical", value_parser = parse_oracle)]
        oracle: Oracle,
        #[arg(long, default_value = "full", value_parser = parse_variant)]
        variant: Variant,
        #[arg(long)]
        odd_primes_only: bool,
        /// Segment length for the classical sieve (power of two, >= 64).
        #[arg(long, value_parser = parse_count)]
        segment: Option<u64>,
    },
    /// Compare the Case I and Case II constructions of one variant.
    Compare {
        #[arg(long, value_parser = parse_count)]
        bound: u64,
        #[arg(long, default_value = "full", value_parser = parse_variant)]
        variant: Variant,
        #[arg(long)]
        odd_primes_only: bool,
    },
    /// Check that every odd n in [lo, hi] above 7 is a sum of three odd primes.
    Verify(VerifyArgs),
    /// Write one of the predefined number-line figures as SVG.
    Plot {
        #[arg(long)]
        figure: String,
        /// Defaults to `figure_<id>.svg` in the current directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        x_min: Option<f64>,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        sample_step: Option<f64>,
    },
    /// Time classical against harmonic materialization.
    Bench {
        #[arg(long, default_value = "1000000", value_parser = parse_count)]
        bound: u64,
    },
    /// Sample random triples of odd numbers and check each sum is odd and above 7.
    Corollary {
        #[arg(long, default_value = "1000000", value_parser = parse_count)]
        samples: u64,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_count)]
    lo: u64,
    #[arg(long, value_parser = parse_count)]
    hi: u64,
    /// Checkpoint log; an existing log for the same run is resumed.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Odd numbers per checkpoint block.
    #[arg(long, value_parser = parse_count)]
    checkpoint_every: Option<u64>,
    /// Segment length for the prime table sieve.
    #[arg(long, value_parser = parse_count)]
    segment: Option<u64>,
    /// Read the prime table from an HSV1 cache instead of sieving.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Also write the report here. On a counterexample the report always
    /// goes to a file, `hsv_counterexample.json` if this is unset.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Record min/max representation counts (hi <= 10^6, no checkpointing).
    #[arg(long)]
    representation_stats: bool,
    #[arg(long, hide = true)]
    halt_after_checkpoints: Option<u64>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_oracle(s: &str) -> Result<Oracle, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_budget(s: &str) -> Result<u64, String> {
    parse_byte_size(s).map_err(|e| e.to_string())
}

/// Accepts plain integers plus `10^6`, `1e6` and `1_000_000`.
fn parse_count(s: &str) -> Result<u64, String> {
    let t: String = s.trim().chars().filter(|&c| c != '_').collect();
    let bad = || format!("invalid count {s:?}");
    let power = |base: &str, exp: &str| -> Result<u64, String> {
        let base: u64 = base.parse().map_err(|_| bad())?;
        let exp: u32 = exp.parse().map_err(|_| bad())?;
        base.checked_pow(exp)
            .ok_or_else(|| format!("{s:?} overflows"))
    };
    if let Some((b, e)) = t.split_once('^') {
        power(b, e)
    } else if let Some((m, e)) = t.split_once(['e', 'E']) {
        let m: u64 = m.parse().map_err(|_| bad())?;
        m.checked_mul(power("10", e)?)
            .ok_or_else(|| format!("{s:?} overflows"))
    } else {
        t.parse().map_err(|_| bad())
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Capacity { .. } => 3,
        Error::NoTripleFound(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("hsv: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let g = &cli.global;
    match cli.command {
        Command::Sieve {
            bound,
            cache_out,
            oracle,
            variant,
            odd_primes_only,
            segment,
        } => {
            let mut cfg = base_config("sieve", g);
            cfg.bound = Some(bound);
            cfg.oracle = Some(oracle);
            cfg.variant = Some(variant);
            cfg.odd_primes_only = odd_primes_only;
            cfg.segment = segment;
            cfg.cache = cache_out.clone();
            let table = build_table(&cfg, g)?;
            if let Some(path) = &cache_out {
                write_cache(&table, path)?;
            }
            let counts = table.counts();
            let (prime_count, max_prime) = if table.yields_primes() {
                (json!(table.prime_count(bound)?), json!(table.max_prime()?))
            } else {
                (Value::Null, Value::Null)
            };
            let summary = json!({
                "command": "sieve",
                "bound": bound,
                "oracle": oracle.to_string(),
                "variant": variant.to_string(),
                "odd_primes_only": odd_primes_only,
                "prime_count": prime_count,
                "max_prime": max_prime,
                "crossed": counts.crossed,
                "survivor": counts.survivor,
                "untouched": counts.untouched,
                "cache_out": cache_out.as_ref().map(|p| p.display().to_string()),
                "config_fingerprint": cfg.fingerprint(),
            });
            emit(&summary, g.format)?;
            Ok(0)
        }
        Command::Compare {
            bound,
            variant,
            odd_primes_only,
        } => {
            let report = compare_constructions_with(
                variant,
                bound,
                odd_primes_only,
                &sieve_options(g, None),
            )?;
            emit(&serde_json::to_value(&report)?, g.format)?;
            Ok(if report.equivalent() { 0 } else { 1 })
        }
        Command::Verify(args) => cmd_verify(args, g),
        Command::Plot {
            figure,
            out,
            x_min,
            x_max,
            amplitude,
            sample_step,
        } => {
            let id: FigureId = figure.parse()?;
            if id == FigureId::Custom {
                return Err(Error::Config(
                    "the custom figure needs a construction and is only available from the library"
                        .into(),
                ));
            }
            let mut spec = PlotSpec::for_figure(id);
            spec.x_range = (
                x_min.unwrap_or(spec.x_range.0),
                x_max.unwrap_or(spec.x_range.1),
            );
            spec.amplitude = amplitude.unwrap_or(spec.amplitude);
            spec.sample_step = sample_step.unwrap_or(spec.sample_step);
            spec.validate()?;
            let construction = figure_construction(id, spec.required_bound())?;
            let svg = render_figure(&spec, &construction)?;
            let markers = marker_set(&spec, &construction)?;
            let path = out.unwrap_or_else(|| PathBuf::from(id.file_name()));
            fs::write(&path, &svg)?;
            emit(
                &json!({
                    "command": "plot",
                    "figure": id.slug(),
                    "out": path.display().to_string(),
                    "bytes": svg.len(),
                    "terms": construction.len(),
                    "markers": markers.len(),
                }),
                g.format,
            )?;
            Ok(0)
        }
        Command::Bench { bound } => {
            let opts = sieve_options(g, None);
            let t0 = Instant::now();
            let classical = classical_sieve_with(bound, &opts)?;
            let classical_secs = t0.elapsed().as_secs_f64().max(1e-9);
            let t1 = Instant::now();
            let construction = spawn_construction(Variant::Full, SpawnRule::CaseI, bound, false)?;
            let harmonic = materialize_with(&construction, &opts)?;
            let harmonic_secs = t1.elapsed().as_secs_f64().max(1e-9);
            let cp = classical.prime_count(bound)?;
            let hp = harmonic.prime_count(bound)?;
            let numbers = (bound - 1) as f64;
            emit(
                &json!({
                    "command": "bench",
                    "bound": bound,
                    "classical": {
                        "prime_count": cp,
                        "seconds": classical_secs,
                        "numbers_per_second": numbers / classical_secs,
                    },
                    "harmonic": {
                        "prime_count": hp,
                        "terms": construction.len(),
                        "seconds": harmonic_secs,
                        "numbers_per_second": numbers / harmonic_secs,
                    },
                    "counts_equal": cp == hp,
                }),
                g.format,
            )?;
            Ok(0)
        }
        Command::Corollary { samples } => {
            let t0 = Instant::now();
            let holds = three_odds_sum_property(samples, g.seed)?;
            emit(
                &json!({
                    "command": "corollary",
                    "samples": samples,
                    "seed": g.seed,
                    "holds": holds,
                    "seconds": t0.elapsed().as_secs_f64(),
                }),
                g.format,
            )?;
            Ok(if holds { 0 } else { 1 })
        }
    }
}

fn cmd_verify(args: VerifyArgs, g: &Global) -> Result<u8, Error> {
    let mut cfg = base_config("verify", g);
    cfg.lo = Some(args.lo);
    cfg.hi = Some(args.hi);
    cfg.segment = args.segment;
    cfg.cache = args.cache.clone();
    cfg.output = args.output.clone();

    let table = match &args.cache {
        Some(path) => {
            let table = read_cache(path)?;
            if table.bound() < args.hi {
                return Err(Error::Config(format!(
                    "cache {} covers [2, {}] but the run needs [2, {}]; re-create it with `hsv sieve --bound {}`",
                    path.display(),
                    table.bound(),
                    args.hi,
                    args.hi
                )));
            }
            table
        }
        None => {
            cfg.oracle = Some(Oracle::Classical);
            classical_sieve_with(args.hi.max(2), &sieve_options(g, args.segment))?
        }
    };

    let mut vcfg = VerifyConfig::new(args.lo, args.hi);
    if let Some(w) = g.workers {
        vcfg = vcfg.workers(w);
    }
    if let Some(every) = args.checkpoint_every {
        vcfg = vcfg.every(every);
    }
    if let Some(path) = &args.checkpoint {
        vcfg = vcfg.checkpoint(path);
    }
    vcfg.representation_stats = args.representation_stats;

    match verify_range_until(&vcfg, &table, args.halt_after_checkpoints)? {
        RunOutcome::Halted { lineage } => {
            emit(
                &json!({
                    "command": "verify",
                    "halted": true,
                    "checkpoints": lineage.len(),
                    "last_n": lineage.last().map(|r| r.last_n),
                }),
                g.format,
            )?;
            Ok(EXIT_HALTED)
        }
        RunOutcome::Completed(report) => {
            let json_text = report.to_json()?;
            let persist = match (&args.output, report.success) {
                (Some(p), _) => Some(p.clone()),
                (None, false) => Some(PathBuf::from("hsv_counterexample.json")),
                (None, true) => None,
            };
            if let Some(path) = &persist {
                write_report(path, &json_text)?;
            }
            match g.format {
                Format::Json => print!("{json_text}"),
                Format::Csv => print!("{}", report.to_csv()),
                Format::Text => print!("{}", render_text(&serde_json::to_value(&report)?)),
            }
            if report.success {
                Ok(0)
            } else {
                eprintln!(
                    "hsv: counterexample candidate {:?}; report written to {}",
                    report.failures,
                    persist
                        .as_deref()
                        .map_or_else(String::new, |p| p.display().to_string())
                );
                Ok(4)
            }
        }
    }
}

fn write_report(path: &Path, text: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn base_config(command: &str, g: &Global) -> RunConfig {
    let mut cfg = RunConfig::new(command);
    cfg.seed = g.seed;
    cfg.workers = g.workers;
    cfg.format = g.format;
    if let Some(b) = g.memory_budget {
        cfg.memory_budget = b;
    }
    cfg
}

fn sieve_options(g: &Global, segment: Option<u64>) -> SieveOptions {
    let mut opts = SieveOptions {
        segment_length: segment.unwrap_or(DEFAULT_SEGMENT_LENGTH),
        workers: g.workers,
        ..SieveOptions::default()
    };
    if let Some(b) = g.memory_budget {
        opts.memory_budget = b;
    }
    opts
}

fn build_table(cfg: &RunConfig, g: &Global) -> Result<ClassificationTable, Error> {
    let bound = cfg.bound.expect("sieve sets a bound");
    let opts = sieve_options(g, cfg.segment);
    let oracle = cfg.oracle.unwrap_or(Oracle::Classical);
    let variant = cfg.variant.unwrap_or(Variant::Full);
    match oracle.spawn_rule() {
        None => {
            if variant != Variant::Full || cfg.odd_primes_only {
                return Err(Error::Config(
                    "--variant and --odd-primes-only apply to the harmonic oracles only".into(),
                ));
            }
            classical_sieve_with(bound, &opts)
        }
        Some(rule) => {
            let construction = spawn_construction(variant, rule, bound, cfg.odd_primes_only)?;
            materialize_with(&construction, &opts)
        }
    }
}

/// Flattens nested objects into dotted keys; arrays become `;`-joined values.
fn flatten(value: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, child, out);
                }
            }
            other => out.push((prefix.to_string(), scalar(other))),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            Value::Array(items) => items
                .iter()
                .map(|i| match i {
                    Value::Object(_) => i.to_string(),
                    other => scalar(other),
                })
                .collect::<Vec<_>>()
                .join(";"),
            other => other.to_string(),
        }
    }
    let mut out = Vec::new();
    walk("", value, &mut out);
    out
}

fn render_text(value: &Value) -> String {
    flatten(value)
        .into_iter()
        .map(|(k, v)| format!("{k}: {v}\n"))
        .collect()
}

fn render_csv(value: &Value) -> Result<String, Error> {
    let rows = flatten(value);
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(rows.iter().map(|(k, _)| k)).map_err(io)?;
    w.write_record(rows.iter().map(|(_, v)| v)).map_err(io)?;
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn emit(value: &Value, format: Format) -> Result<(), Error> {
    match format {
        Format::Json => {
            let obj: &Map<String, Value> = value.as_object().expect("summaries are objects");
            println!("{}", serde_json::to_string_pretty(obj)?);
        }
        Format::Text => print!("{}", render_text(value)),
        Format::Csv => print!("{}", render_csv(value)?),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accept_common_notations() {
        assert_eq!(parse_count("1000").unwrap(), 1000);
        assert_eq!(parse_count("10^6").unwrap(), 1_000_000);
        assert_eq!(parse_count("1e7").unwrap(), 10_000_000);
        assert_eq!(parse_count("3E2").unwrap(), 300);
        assert_eq!(parse_count("1_000").unwrap(), 1000);
        assert!(parse_count("10^30").is_err());
        assert!(parse_count("ten").is_err());
    }

    #[test]
    fn text_and_csv_carry_the_same_numbers() {
        let v = json!({"a": 1, "b": {"c": 2.5, "d": [3, 4]}, "e": null});
        assert_eq!(render_text(&v), "a: 1\nb.c: 2.5\nb.d: 3;4\ne: \n");
        assert_eq!(render_csv(&v).unwrap(), "a,b.c,b.d,e\n1,2.5,3;4,\n");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
