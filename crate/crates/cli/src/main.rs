//! `duality` — scan, point-evaluate, and verify a symmetric two-way
//! interferometer with a which-way detector.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 verification
//! failure.

mod output;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use duality_core::interferometer::{PhaseShift, QuantonOutcome};
use duality_core::optimizer::{run_scan, scan_cell, substream_seed, ScanConfig};
use duality_core::whichway::duality_residual;

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "duality",
    version,
    about = "Visibility and distinguishability in a two-way interferometer with a which-way detector",
    long_about = "Simulates a symmetric two-way interferometer with a which-way detector and \
                  optimizes the detector readout basis by Monte Carlo search. When the quanton \
                  is read out before the detector, the optimized distinguishability can exceed \
                  the D^2 + V^2 <= 1 bound that holds for detector-first readout."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the phase grid for each visibility and emit plot-ready rows
    Scan(ScanArgs),
    /// Evaluate a single (visibility, delta, sigma) cell and its duality residual
    Point(PointArgs),
    /// Run the numeric invariant suite and print one row per check
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy)]
enum ThreadCount {
    Auto,
    Fixed(usize),
}

fn parse_visibility(s: &str) -> Result<f64, String> {
    let value: f64 = s.parse().map_err(|e| format!("invalid visibility '{s}': {e}"))?;
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(format!("visibility must lie in [0, 1], got {s}"));
    }
    Ok(value)
}

fn parse_sigma(s: &str) -> Result<QuantonOutcome, String> {
    match s {
        "+1" | "1" => Ok(QuantonOutcome::PortA),
        "-1" => Ok(QuantonOutcome::PortB),
        _ => Err(format!("sigma must be +1 or -1, got '{s}'")),
    }
}

fn parse_delta(s: &str) -> Result<f64, String> {
    let value: f64 = s.parse().map_err(|e| format!("invalid delta '{s}': {e}"))?;
    if !value.is_finite() {
        return Err(format!("delta must be finite, got {s}"));
    }
    Ok(value)
}

fn parse_positive(s: &str) -> Result<usize, String> {
    let value: usize = s.parse().map_err(|e| format!("invalid count '{s}': {e}"))?;
    if value == 0 {
        return Err("count must be at least 1".to_string());
    }
    Ok(value)
}

fn parse_threads(s: &str) -> Result<ThreadCount, String> {
    if s == "auto" {
        return Ok(ThreadCount::Auto);
    }
    let value: usize = s
        .parse()
        .map_err(|_| format!("threads must be a positive integer or 'auto', got '{s}'"))?;
    if value == 0 {
        return Err("threads must be at least 1".to_string());
    }
    Ok(ThreadCount::Fixed(value))
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let value: f64 = s.parse().map_err(|e| format!("invalid tolerance '{s}': {e}"))?;
    if !value.is_finite() || value < 0.0 {
        return Err(format!("tolerance must be a non-negative real, got {s}"));
    }
    Ok(value)
}

#[derive(Args)]
struct ScanArgs {
    /// Comma-separated visibilities in [0, 1]
    #[arg(long, value_delimiter = ',', value_parser = parse_visibility,
          default_value = "0.5,0.9,0.97")]
    visibility: Vec<f64>,
    /// Number of uniform phase-grid steps over [0, 2*pi)
    #[arg(long, value_parser = parse_positive, default_value_t = 50)]
    delta_steps: usize,
    /// Random readout bases per grid cell
    #[arg(long, value_parser = parse_positive, default_value_t = 10_000)]
    samples: usize,
    /// Quanton outcome: +1 (port a) or -1 (port b)
    #[arg(long, value_parser = parse_sigma, allow_hyphen_values = true, default_value = "+1")]
    sigma: QuantonOutcome,
    /// Master seed; the sole source of randomness
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output path (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads: a positive integer or "auto"
    #[arg(long, value_parser = parse_threads, default_value = "auto")]
    threads: ThreadCount,
}

#[derive(Args)]
struct PointArgs {
    /// Visibility in [0, 1]
    #[arg(long, value_parser = parse_visibility)]
    visibility: f64,
    /// Phase shift in radians (range-reduced to [0, 2*pi))
    #[arg(long, value_parser = parse_delta, allow_hyphen_values = true)]
    delta: f64,
    /// Random readout bases to sample
    #[arg(long, value_parser = parse_positive, default_value_t = 10_000)]
    samples: usize,
    /// Quanton outcome: +1 (port a) or -1 (port b)
    #[arg(long, value_parser = parse_sigma, allow_hyphen_values = true, default_value = "+1")]
    sigma: QuantonOutcome,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output path (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Override the per-check tolerances
    #[arg(long, value_parser = parse_tolerance)]
    tolerance: Option<f64>,
    /// Seed for the randomized checks
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads: a positive integer or "auto"
    #[arg(long, value_parser = parse_threads, default_value = "auto")]
    threads: ThreadCount,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Scan(args) => cmd_scan(args),
        Command::Point(args) => cmd_point(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

/// Runs `work` on a fixed-size rayon pool, or the default pool for `Auto`.
fn with_threads<T: Send>(threads: ThreadCount, work: impl FnOnce() -> T + Send) -> io::Result<T> {
    match threads {
        ThreadCount::Auto => Ok(work()),
        ThreadCount::Fixed(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(io::Error::other)?;
            Ok(pool.install(work))
        }
    }
}

fn write_to(out: &Option<PathBuf>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
    match out {
        Some(path) => {
            let mut writer = BufWriter::new(File::create(path)?);
            write(&mut writer)?;
            writer.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()
        }
    }
}

fn fail_usage(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("duality: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn fail_io(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("duality: {message}");
    ExitCode::from(EXIT_IO)
}

fn cmd_scan(args: ScanArgs) -> ExitCode {
    let config = ScanConfig {
        visibilities: args.visibility,
        delta_steps: args.delta_steps,
        samples: args.samples,
        sigma: args.sigma,
        master_seed: args.seed,
    };
    if let Err(error) = config.validate() {
        return fail_usage(error);
    }
    let records = match with_threads(args.threads, || run_scan(&config)) {
        Ok(Ok(records)) => records,
        Ok(Err(error)) => return fail_usage(error),
        Err(error) => return fail_io(error),
    };
    let result = write_to(&args.out, |writer| match args.format {
        OutputFormat::Csv => output::write_csv(writer, &records),
        OutputFormat::Json => output::write_json(writer, &records),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => fail_io(error),
    }
}

fn cmd_point(args: PointArgs) -> ExitCode {
    let ps = PhaseShift::new(args.delta);
    let seed = substream_seed(args.seed, 0, 0);
    let record = match scan_cell(args.visibility, ps, args.sigma, args.samples, seed) {
        Ok(record) => record,
        Err(error) => return fail_usage(error),
    };
    let residual = record.d_opt.map(|d| duality_residual(d, record.visibility));
    let result = write_to(&args.out, |writer| match args.format {
        OutputFormat::Csv => output::write_point_csv(writer, &record, residual),
        OutputFormat::Json => output::write_point_json(writer, &record, residual),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => fail_io(error),
    }
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let results = match with_threads(args.threads, || verify::run_all(args.seed, args.tolerance)) {
        Ok(results) => results,
        Err(error) => return fail_io(error),
    };
    let name_width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut all_passed = true;
    println!("{:<width$}  {:>13}  {:>10}  result", "check", "residual", "tolerance", width = name_width);
    for result in &results {
        let status = if result.passed() { "PASS" } else { "FAIL" };
        all_passed &= result.passed();
        println!(
            "{:<width$}  {:>13.4e}  {:>10.1e}  {status}",
            result.name,
            result.residual,
            result.tolerance,
            width = name_width
        );
    }
    let passed = results.iter().filter(|r| r.passed()).count();
    println!("{passed}/{} checks passed", results.len());
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    }
}
