//! `charsum` — run the verification suites from the command line.
//!
//! Exit codes: 0 all reports pass, 1 at least one verification failure,
//! 2 configuration error.

use anyhow::Context;
use charsum_core::harness::{
    bench_kernels, emit_report, run_verifier, GridSpec, ReportFormat, RunConfig, Tolerances,
    VERIFIER_NAMES,
};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "charsum", version, about = "verification suites for prime-power character sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verifier over a parameter grid.
    Verify {
        /// One of: charsum, cbeta, post-poisson, bound-zero, counting,
        /// delta, g-properties, voronoi-gl2, voronoi-divisor, gl3-decay,
        /// d3-voronoi, stationary-phase, second-moment, exponent.
        name: String,
        /// TOML config file with [grid] and [tolerances] tables.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Inline grid overrides, e.g. "p=3,5; r=4; n2=1..5".
        #[arg(long)]
        grid: Option<String>,
        /// Report output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report format.
        #[arg(long, default_value = "json")]
        format: String,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Override the oracle tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Override the measured-ratio ceiling.
        #[arg(long, value_name = "RATIO")]
        ratio_ceiling: Option<f64>,
        /// Seed for sampled grids.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Benchmark the sum kernels over a modulus ladder.
    Bench {
        /// Moduli to benchmark.
        #[arg(long, value_delimiter = ',', default_values_t = [1_000u64, 10_000, 100_000])]
        sizes: Vec<u64>,
        /// Batched-over-naive inverse speedup to assert at q ≥ 10⁴.
        #[arg(long, default_value_t = 2.0)]
        speedup_floor: f64,
    },
    /// Re-emit a JSON-lines report file in another format.
    Report {
        input: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_format(s: &str) -> anyhow::Result<ReportFormat> {
    match s {
        "json" | "json-lines" | "jsonl" => Ok(ReportFormat::JsonLines),
        "csv" => Ok(ReportFormat::Csv),
        other => anyhow::bail!("unknown format `{other}` (use json or csv)"),
    }
}

fn run() -> anyhow::Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            name,
            config,
            grid,
            out,
            format,
            jobs,
            tolerance,
            ratio_ceiling,
            seed,
        } => {
            if !VERIFIER_NAMES.contains(&name.as_str()) {
                anyhow::bail!(
                    "unknown verifier `{name}`; available: {}",
                    VERIFIER_NAMES.join(", ")
                );
            }
            let mut run_config: RunConfig = match &config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let mut parsed: RunConfig = toml::from_str(&text)
                        .with_context(|| format!("parsing {}", path.display()))?;
                    parsed.verifier = name.clone();
                    parsed
                }
                None => RunConfig {
                    verifier: name.clone(),
                    grid: GridSpec::default(),
                    tolerances: Tolerances::default(),
                    jobs: 1,
                    seed: 0,
                },
            };
            if let Some(inline) = &grid {
                run_config.grid = GridSpec::parse_inline(run_config.grid, inline)
                    .map_err(|e| anyhow::anyhow!("{e}"))?;
            }
            if let Some(t) = tolerance {
                run_config.tolerances.oracle_tol = t;
                run_config.tolerances.voronoi_rel = t.max(run_config.tolerances.voronoi_rel);
            }
            if let Some(c) = ratio_ceiling {
                run_config.tolerances.ratio_ceiling = c;
            }
            run_config.jobs = jobs;
            run_config.seed = seed;
            let reports = run_verifier(&run_config).map_err(|e| anyhow::anyhow!("{e}"))?;
            let fmt = parse_format(&format)?;
            let text = emit_report(&reports, fmt);
            match out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            let failed = reports.iter().filter(|r| !r.pass).count();
            eprintln!(
                "{}: {} reports, {} failed",
                name,
                reports.len(),
                failed
            );
            Ok(if failed > 0 { 1 } else { 0 })
        }
        Command::Bench { sizes, speedup_floor } => {
            let (rows, speedup_ok) = bench_kernels(&sizes, speedup_floor);
            println!("{:<22} {:>10} {:>18}", "kernel", "size", "terms/second");
            for row in &rows {
                println!(
                    "{:<22} {:>10} {:>18.3e}",
                    row.kernel, row.size, row.terms_per_second
                );
            }
            if !speedup_ok {
                eprintln!("batched inverse table below the {speedup_floor}x floor at q >= 10^4");
                return Ok(1);
            }
            Ok(0)
        }
        Command::Report { input, format, out } => {
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let reports: Vec<_> = text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    charsum_core::harness::parse_report_line(l)
                        .ok_or_else(|| anyhow::anyhow!("bad report line: {l}"))
                })
                .collect::<anyhow::Result<_>>()?;
            let fmt = parse_format(&format)?;
            let rendered = emit_report(&reports, fmt);
            match out {
                Some(path) => std::fs::write(&path, rendered)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{rendered}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
