//! `sofia`: mine Δ-stable interval patterns from a CSV table.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use sofia_core::io::{parse_input, parse_path, serialize_patterns, Comparison, Timings};
use sofia_core::{
    best_delta_search, brute_force_lattice, drop_incomplete, enumerate_closed_patterns, postfilter, simplify,
    ChainSchedule, Dataset, EnumerationConfig, Error, Miner, OutputFormat, ParseOptions, PatternSet, RunHeader,
    ScheduleStrategy, SofiaConfig, DEFAULT_ORACLE_CAP,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_NONE_FOUND: u8 = 4;
const EXIT_DISAGREE: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Sofia,
    Baseline,
    Oracle,
}

#[derive(Debug, Parser)]
#[command(name = "sofia", version, about = "Mine Δ-stable closed interval patterns")]
struct Cli {
    /// Input table (`-` reads standard input).
    #[arg(long)]
    input: PathBuf,

    #[arg(long, value_enum, default_value_t = Engine::Sofia)]
    engine: Engine,

    /// Keep patterns with Δ at least this value.
    #[arg(long, conflicts_with = "best")]
    theta: Option<usize>,

    /// Search for the largest Δ reached by any pattern.
    #[arg(long)]
    best: bool,

    /// Join attribute values closer than gamma times the largest gap.
    #[arg(long)]
    gamma: Option<f64>,

    #[arg(long, default_value = "round-robin", value_parser = parse_schedule)]
    schedule: ScheduleStrategy,

    /// Support threshold for the baseline enumerator.
    #[arg(long)]
    min_support: Option<usize>,

    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: OutputFormat,

    /// Run Sofia in best mode and check the postfiltered baseline agrees.
    #[arg(long, conflicts_with_all = ["theta", "engine"])]
    compare: bool,

    #[arg(long, default_value_t = 1)]
    threads: usize,

    /// Largest dataset the brute-force oracle accepts.
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: usize,

    /// Abort when a Sofia step holds, or the baseline emits, more patterns than this.
    #[arg(long)]
    capacity: Option<usize>,

    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Leave wall-clock timings out of the report.
    #[arg(long)]
    no_timing: bool,
}

fn parse_schedule(s: &str) -> Result<ScheduleStrategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, error: anyhow::anyhow!(msg.into()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) => EXIT_USAGE,
            Error::OracleCapExceeded { .. } | Error::CapacityExceeded { .. } => EXIT_CAP,
            _ => EXIT_DATA,
        };
        Failure { code, error: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: EXIT_DATA, error }
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn validate(cli: &Cli) -> Result<(), Failure> {
    if cli.threads == 0 {
        return Err(Failure::usage("--threads must be at least 1"));
    }
    if let Some(g) = cli.gamma {
        if !(g > 0.0 && g < 1.0) {
            return Err(Failure::usage(format!("--gamma must lie in (0, 1), got {g}")));
        }
    }
    if cli.compare {
        if cli.best {
            return Err(Failure::usage("--compare always runs in best mode; drop --best"));
        }
        return Ok(());
    }
    match cli.engine {
        Engine::Sofia if cli.theta.is_none() && !cli.best => {
            Err(Failure::usage("the sofia engine needs exactly one of --theta N or --best"))
        }
        Engine::Baseline if cli.best => Err(Failure::usage("--best is not available for the baseline engine")),
        Engine::Sofia | Engine::Oracle if cli.min_support.is_some() => {
            Err(Failure::usage("--min-support only applies to the baseline engine"))
        }
        _ => Ok(()),
    }
}

fn load(cli: &Cli, timings: &mut Timings) -> Result<Dataset, Failure> {
    let t = Instant::now();
    let opts = ParseOptions::default();
    let raw = if cli.input.as_os_str() == "-" {
        parse_input(std::io::stdin().lock(), opts)?
    } else {
        parse_path(&cli.input, opts)?
    };
    timings.parse_ms = ms(t);

    let t = Instant::now();
    let (table, cleaning) = drop_incomplete(raw)?;
    if !cleaning.removed_columns.is_empty() || cleaning.removed_rows > 0 {
        eprintln!(
            "cleaning: dropped columns [{}], {} incomplete rows",
            cleaning.removed_columns.join(", "),
            cleaning.removed_rows
        );
    }
    let mut ds = table.into_dataset()?;
    if let Some(gamma) = cli.gamma {
        let (simplified, report) = simplify(&ds, gamma)?;
        for a in &report.attributes {
            eprintln!(
                "simplify: {} delta_max={} beta={} values {} -> {}",
                a.attribute, a.delta_max, a.beta, a.values_before, a.values_after
            );
        }
        ds = simplified;
    }
    timings.preprocess_ms = ms(t);
    Ok(ds)
}

fn sofia_config(cli: &Cli, theta: usize) -> SofiaConfig {
    SofiaConfig::new(theta).with_schedule(cli.schedule).with_threads(cli.threads).with_capacity(cli.capacity)
}

/// Mines according to the flags and fills the engine-specific header fields.
fn mine(cli: &Cli, ds: &Dataset, header: &mut RunHeader) -> Result<(PatternSet, u8), Failure> {
    let schedule_fields = |header: &mut RunHeader| {
        header.schedule = Some(cli.schedule.to_string());
        header.chain_length = ChainSchedule::new(ds, cli.schedule).len();
    };
    if cli.compare {
        return compare(cli, ds, header);
    }
    match cli.engine {
        Engine::Sofia => {
            schedule_fields(header);
            let run = if cli.best {
                let found = best_delta_search(ds, &sofia_config(cli, 1))?;
                header.theta = Some(found.theta);
                found.run
            } else {
                let theta = cli.theta.expect("validated");
                header.theta = Some(theta);
                Miner::new(ds, sofia_config(cli, theta)).run()?
            };
            header.patterns_per_step = run.trace.iter().map(|s| s.kept).collect();
            Ok((run.patterns, 0))
        }
        Engine::Baseline => {
            let min_support = cli.min_support.unwrap_or(1);
            let theta = cli.theta.unwrap_or(0);
            header.min_support = Some(min_support);
            header.theta = Some(theta);
            let cfg = EnumerationConfig { min_support, max_patterns: cli.capacity };
            let out = enumerate_closed_patterns(ds, &cfg)?;
            header.interrupted = out.stats.interrupted;
            let kept = postfilter(&out.patterns, theta, ds)?;
            let code = if out.stats.interrupted { EXIT_CAP } else { 0 };
            if out.stats.interrupted {
                eprintln!("baseline interrupted after {} patterns", out.stats.emitted);
            }
            Ok((kept, code))
        }
        Engine::Oracle => {
            let lattice = brute_force_lattice(ds, cli.oracle_cap)?;
            let all = postfilter(&lattice, 0, ds)?;
            let theta = if cli.best {
                all.iter().filter_map(|p| p.delta()).max().unwrap_or(0)
            } else {
                cli.theta.unwrap_or(0)
            };
            header.theta = Some(theta);
            Ok((postfilter(&lattice, theta, ds)?, 0))
        }
    }
}

fn compare(cli: &Cli, ds: &Dataset, header: &mut RunHeader) -> Result<(PatternSet, u8), Failure> {
    header.schedule = Some(cli.schedule.to_string());
    header.chain_length = ChainSchedule::new(ds, cli.schedule).len();
    let found = best_delta_search(ds, &sofia_config(cli, 1))?;
    header.theta = Some(found.theta);
    header.patterns_per_step = found.run.trace.iter().map(|s| s.kept).collect();
    let peak = found.run.peak_patterns();
    let mined = found.run.patterns;
    let min_support = cli
        .min_support
        .or_else(|| mined.iter().map(|p| p.support()).min())
        .unwrap_or(1);
    header.min_support = Some(min_support);

    let cfg = EnumerationConfig { min_support, max_patterns: cli.capacity };
    let out = enumerate_closed_patterns(ds, &cfg)?;
    let filtered = postfilter(&out.patterns, found.theta, ds)?;
    let agree = !out.stats.interrupted && filtered.extents() == mined.extents();
    header.interrupted = out.stats.interrupted;
    header.comparison = Some(Comparison {
        delta: found.theta,
        patterns: mined.len(),
        min_support,
        baseline_emitted: out.stats.emitted,
        baseline_interrupted: out.stats.interrupted,
        sofia_peak_patterns: peak,
        agree,
    });
    eprintln!(
        "compare: delta={} patterns={} min_support={} baseline_emitted={} agree={}",
        found.theta,
        mined.len(),
        min_support,
        out.stats.emitted,
        agree
    );
    let code = if out.stats.interrupted {
        EXIT_CAP
    } else if !agree {
        EXIT_DISAGREE
    } else {
        0
    };
    Ok((mined, code))
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    validate(cli)?;
    let mut timings = Timings::default();
    let ds = load(cli, &mut timings)?;

    let mut header = RunHeader {
        engine: if cli.compare { "compare".into() } else { format!("{:?}", cli.engine).to_lowercase() },
        best_mode: cli.best || cli.compare,
        gamma: cli.gamma,
        objects: ds.num_objects(),
        attributes: ds.num_attributes(),
        ..Default::default()
    };
    let t = Instant::now();
    let (patterns, code) = mine(cli, &ds, &mut header)?;
    timings.mine_ms = ms(t);
    if !cli.no_timing {
        header.timings = Some(timings);
    }

    let t = Instant::now();
    let text = serialize_patterns(&ds, &patterns, &header, cli.format);
    match &cli.output {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).context("writing report")?;
        }
    }
    if !cli.no_timing {
        eprintln!("serialize: {:.3} ms", ms(t));
    }

    if code != 0 {
        return Ok(code);
    }
    Ok(if patterns.is_empty() { EXIT_NONE_FOUND } else { 0 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
