use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::Parser;
use vmsort::{LaneBackend, MergeKernel};
use vmsort_cli::{run_suite, write_csv, BenchOpts, Pattern, Suite};

/// Benchmark harness for the vectorized merge sort: times the in-register
/// geometry sweep, the merge kernels, and the full sort against the
/// standard-library baseline, emitting CSV.
#[derive(Parser, Debug)]
#[command(name = "bench", version)]
struct Args {
    /// Suite to run: geometry, kernels or overall.
    #[arg(long)]
    suite: String,

    /// Element count; overrides each suite's default.
    #[arg(long)]
    size: Option<usize>,

    /// Input pattern: random, sorted, reverse or dup-<k>.
    #[arg(long, default_value = "random")]
    pattern: String,

    /// Worker count for the parallel rows; 0 means all hardware threads.
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Merge kernel: serial, vectorized or hybrid.
    #[arg(long, default_value = "hybrid")]
    kernel: String,

    /// Repetitions per record (median is reported); at least 5.
    #[arg(long, default_value_t = 5)]
    reps: usize,

    /// Seed for deterministic input generation.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Write CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,

    /// Lane backend: emulated or native.
    #[arg(long, default_value = "emulated")]
    backend: String,

    /// Cap the default size sweep of the overall suite.
    #[arg(long)]
    max_size: Option<usize>,
}

fn main() -> Result<()> {
    let args = Args::parse();
    let suite = Suite::parse(&args.suite)?;
    let opts = BenchOpts {
        pattern: Pattern::parse(&args.pattern)?,
        size: args.size,
        threads: args.threads,
        kernel: MergeKernel::parse(&args.kernel)
            .ok_or_else(|| anyhow!("unknown kernel {:?}", args.kernel))?,
        backend: LaneBackend::parse(&args.backend)
            .ok_or_else(|| anyhow!("unknown backend {:?}", args.backend))?,
        reps: args.reps,
        seed: args.seed,
        max_size: args.max_size,
    };

    let records = run_suite(suite, &opts)?;
    match &args.csv {
        Some(path) => {
            write_csv(&records, File::create(path)?)?;
            eprintln!("wrote {} records to {}", records.len(), path.display());
        }
        None => {
            let stdout = io::stdout();
            write_csv(&records, stdout.lock())?;
            stdout.lock().flush()?;
        }
    }
    Ok(())
}
