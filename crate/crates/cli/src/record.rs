//! Benchmark records and their CSV form.

use std::io::{Read, Write};

use anyhow::Result;
use serde::{Deserialize, Serialize};

/// One measurement row. `rate_me_s` is million elements per second, which
/// for microsecond runtimes equals elements per microsecond, so the
/// invariant `rate = size / runtime_us` holds by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub suite: String,
    pub pattern: String,
    pub size: u64,
    pub algorithm: String,
    pub kernel: String,
    pub threads: u64,
    pub reps: u64,
    pub runtime_us: f64,
    pub rate_me_s: f64,
}

impl BenchRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        suite: &str,
        pattern: &str,
        size: u64,
        algorithm: &str,
        kernel: &str,
        threads: u64,
        reps: u64,
        runtime_us: f64,
    ) -> Self {
        BenchRecord {
            suite: suite.into(),
            pattern: pattern.into(),
            size,
            algorithm: algorithm.into(),
            kernel: kernel.into(),
            threads,
            reps,
            runtime_us,
            rate_me_s: size as f64 / runtime_us,
        }
    }
}

pub fn write_csv<W: Write>(records: &[BenchRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for record in records {
        w.serialize(record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    Ok(r.deserialize().collect::<Result<Vec<_>, _>>()?)
}
