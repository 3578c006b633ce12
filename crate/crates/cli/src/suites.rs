//! The three benchmark suites: the geometry sweep over register counts, the
//! merge-kernel comparison, and the overall sort comparison against the
//! standard-library baseline. Every timed run is validated (ascending output
//! plus a multiset fingerprint) before its record is emitted.

use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use vmsort::sorter::default_column_network;
use vmsort::{
    best16_sorter, is_ascending, merge_kernel_into, odd_even_sorter, sort_parallel, sort_single,
    ComparatorNetwork, InRegisterSorter, LaneBackend, MergeKernel, SortConfig,
};

use crate::input::{gen_input, Pattern};
use crate::record::BenchRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Geometry,
    Kernels,
    Overall,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Suite> {
        match name {
            "geometry" => Ok(Suite::Geometry),
            "kernels" => Ok(Suite::Kernels),
            "overall" => Ok(Suite::Overall),
            _ => bail!("unknown suite {name:?} (expected geometry, kernels or overall)"),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Kernels => "kernels",
            Suite::Overall => "overall",
        }
    }
}

/// Options shared by all suites; defaults mirror the CLI defaults.
#[derive(Debug, Clone)]
pub struct BenchOpts {
    pub pattern: Pattern,
    pub size: Option<usize>,
    pub threads: usize,
    pub kernel: MergeKernel,
    pub backend: LaneBackend,
    pub reps: usize,
    pub seed: u64,
    /// Upper bound applied to the default size sweep of the overall suite.
    pub max_size: Option<usize>,
}

impl Default for BenchOpts {
    fn default() -> Self {
        BenchOpts {
            pattern: Pattern::Random,
            size: None,
            threads: 0,
            kernel: MergeKernel::Hybrid,
            backend: LaneBackend::Emulated,
            reps: 5,
            seed: 42,
            max_size: None,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &BenchOpts) -> Result<Vec<BenchRecord>> {
    if opts.reps < 5 {
        bail!("records must be the median of at least 5 repetitions, got --reps {}", opts.reps);
    }
    match suite {
        Suite::Geometry => geometry_sweep(opts),
        Suite::Kernels => merge_kernel_sweep(opts),
        Suite::Overall => overall_sweep(opts),
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Order-independent content hash; equal multisets hash equal.
pub fn multiset_fingerprint(xs: &[i32]) -> u64 {
    xs.iter().fold(0u64, |acc, &v| acc.wrapping_add(splitmix64(v as u32 as u64)))
}

/// Runs one warm-up (discarded) and `reps` timed repetitions; the closure
/// returns the duration of the sort call alone, so setup and validation
/// stay outside the clock.
fn median_time_us(reps: usize, mut timed: impl FnMut() -> Result<Duration>) -> Result<f64> {
    timed()?;
    let mut times: Vec<f64> = Vec::with_capacity(reps);
    for _ in 0..reps {
        times.push(timed()?.as_secs_f64() * 1e6);
    }
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    Ok(if times.len() % 2 == 1 { times[mid] } else { (times[mid - 1] + times[mid]) / 2.0 })
}

fn validate_sorted(out: &[i32], fingerprint: u64, what: &str) -> Result<()> {
    if !is_ascending(out) {
        bail!("validation failed: {what} output is not ascending");
    }
    if multiset_fingerprint(out) != fingerprint {
        bail!("validation failed: {what} output is not a permutation of its input");
    }
    Ok(())
}

/// Reproduces the register-count sweep: for each geometry, the time to bring
/// every `X` elements of the buffer into sorted order inside the in-register
/// pipeline. `size` is X and `runtime_us` is the per-X-group time, so the
/// rate column is the stage throughput.
fn geometry_sweep(opts: &BenchOpts) -> Result<Vec<BenchRecord>> {
    let buffer_len = opts.size.unwrap_or(1 << 16);
    let base = gen_input(opts.pattern, buffer_len, opts.seed);
    let geometries: [(&str, usize, ComparatorNetwork); 5] = [
        ("r4", 4, odd_even_sorter(4)?),
        ("r8", 8, odd_even_sorter(8)?),
        ("r16", 16, odd_even_sorter(16)?),
        ("r16-best", 16, best16_sorter()),
        ("r32", 32, odd_even_sorter(32)?),
    ];

    let mut records = Vec::new();
    for (label, r, net) in &geometries {
        let cfg = SortConfig::new(*r, 4, opts.kernel, opts.backend)?;
        let block = cfg.block_len();
        let usable = base.len() - base.len() % block;
        if usable == 0 {
            bail!("buffer of {} elements holds no full {}x4 block", base.len(), r);
        }
        let pristine = &base[..usable];
        let fingerprint = multiset_fingerprint(pristine);
        let mut sorter = InRegisterSorter::new(&cfg);
        let mut work = pristine.to_vec();

        let mut x = *r;
        while x <= block.min(64) {
            let median = median_time_us(opts.reps, || {
                work.copy_from_slice(pristine);
                let start = Instant::now();
                for chunk in work.chunks_exact_mut(block) {
                    sorter.sort_to_run_len(chunk, net, x)?;
                }
                let elapsed = start.elapsed();
                for run in work.chunks_exact(x) {
                    if !is_ascending(run) {
                        bail!("validation failed: {label} X={x} left an unsorted run");
                    }
                }
                if multiset_fingerprint(&work) != fingerprint {
                    bail!("validation failed: {label} X={x} lost elements");
                }
                Ok(elapsed)
            })?;
            let groups = (usable / x) as f64;
            records.push(BenchRecord::new(
                "geometry",
                &opts.pattern.name(),
                x as u64,
                label,
                opts.kernel.name(),
                1,
                opts.reps as u64,
                median / groups,
            ));
            x *= 2;
        }
    }
    Ok(records)
}

/// Merging speed for each kernel at the three fixed merge lengths
/// (2x8 -> 16, 2x16 -> 32, 2x32 -> 64), in elements per microsecond.
///
/// Repetitions are interleaved round-robin across the kernels so all three
/// sample the same time windows; otherwise load or frequency drift during
/// the run would skew the comparison between them.
fn merge_kernel_sweep(opts: &BenchOpts) -> Result<Vec<BenchRecord>> {
    const KINDS: [MergeKernel; 3] =
        [MergeKernel::Serial, MergeKernel::Vectorized, MergeKernel::Hybrid];

    let mut records = Vec::new();
    for n in [16usize, 32, 64] {
        let pairs = (opts.size.unwrap_or(1 << 20) / n).max(1);
        let mut input = gen_input(opts.pattern, pairs * n, opts.seed);
        for run in input.chunks_exact_mut(n / 2) {
            run.sort_unstable();
        }
        let fingerprint = multiset_fingerprint(&input);
        let mut out = vec![0i32; input.len()];

        let mut timed_pass = |kind: MergeKernel, out: &mut [i32]| -> Result<Duration> {
            let start = Instant::now();
            for (pair, dst) in input.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
                merge_kernel_into(&pair[..n / 2], &pair[n / 2..], kind, opts.backend, 4, dst)?;
            }
            Ok(start.elapsed())
        };

        let mut times: Vec<Vec<f64>> = vec![Vec::with_capacity(opts.reps); KINDS.len()];
        for rep in 0..=opts.reps {
            for (k, &kind) in KINDS.iter().enumerate() {
                let elapsed = timed_pass(kind, &mut out)?;
                if rep > 0 {
                    // rep 0 is the discarded warm-up
                    times[k].push(elapsed.as_secs_f64() * 1e6);
                }
                for merged in out.chunks_exact(n) {
                    if !is_ascending(merged) {
                        bail!("validation failed: {} kernel left an unsorted merge", kind.name());
                    }
                }
                if multiset_fingerprint(&out) != fingerprint {
                    bail!("validation failed: {} kernel lost elements", kind.name());
                }
            }
        }

        for (k, kind) in KINDS.iter().enumerate() {
            times[k].sort_by(f64::total_cmp);
            let mid = times[k].len() / 2;
            let median = if times[k].len() % 2 == 1 {
                times[k][mid]
            } else {
                (times[k][mid - 1] + times[k][mid]) / 2.0
            };
            records.push(BenchRecord::new(
                "kernels",
                &opts.pattern.name(),
                n as u64,
                &format!("{}-kernel", kind.name()),
                kind.name(),
                1,
                opts.reps as u64,
                median / pairs as f64,
            ));
        }
    }
    Ok(records)
}

fn default_overall_sizes() -> Vec<usize> {
    (9..=27).step_by(3).map(|e| 1usize << e).collect()
}

/// Checks there is headroom for the sort buffers (input, scratch, pristine
/// copy) before committing to a size.
fn memory_allows(size: usize) -> bool {
    let mut probe: Vec<i32> = Vec::new();
    probe.try_reserve_exact(size.saturating_mul(3)).is_ok()
}

/// Sorting rate of the full pipeline against the standard-library baseline,
/// single-threaded and at the requested worker count.
fn overall_sweep(opts: &BenchOpts) -> Result<Vec<BenchRecord>> {
    let sizes = match opts.size {
        Some(s) => vec![s],
        None => {
            let cap = opts.max_size.unwrap_or(usize::MAX);
            default_overall_sizes().into_iter().filter(|&s| s <= cap).collect()
        }
    };
    let threads = if opts.threads == 0 {
        std::thread::available_parallelism().map(usize::from).unwrap_or(1)
    } else {
        opts.threads
    };
    let cfg = SortConfig::new(16, 4, opts.kernel, opts.backend)?;
    // Touch the network cache up front so the first timed run is not odd.
    default_column_network(cfg.r).map_err(|e| anyhow!(e))?;

    let mut thread_counts = vec![1usize];
    if threads > 1 {
        thread_counts.push(threads);
    }

    let mut records = Vec::new();
    for &size in &sizes {
        if !memory_allows(size) {
            eprintln!("warning: skipping size {size}: not enough memory for working buffers");
            continue;
        }
        let pristine = gen_input(opts.pattern, size, opts.seed);
        let fingerprint = multiset_fingerprint(&pristine);
        let mut work = pristine.clone();

        for &t in &thread_counts {
            let median = median_time_us(opts.reps, || {
                work.copy_from_slice(&pristine);
                let start = Instant::now();
                if t == 1 {
                    sort_single(&mut work, &cfg);
                } else {
                    sort_parallel(&mut work, &cfg, t);
                }
                let elapsed = start.elapsed();
                validate_sorted(&work, fingerprint, "neon-ms")?;
                Ok(elapsed)
            })
            .with_context(|| format!("neon-ms size={size} threads={t}"))?;
            records.push(BenchRecord::new(
                "overall",
                &opts.pattern.name(),
                size as u64,
                "neon-ms",
                opts.kernel.name(),
                t as u64,
                opts.reps as u64,
                median,
            ));
        }

        let median = median_time_us(opts.reps, || {
            work.copy_from_slice(&pristine);
            let start = Instant::now();
            work.sort_unstable();
            let elapsed = start.elapsed();
            validate_sorted(&work, fingerprint, "baseline")?;
            Ok(elapsed)
        })
        .with_context(|| format!("baseline size={size}"))?;
        records.push(BenchRecord::new(
            "overall",
            &opts.pattern.name(),
            size as u64,
            "baseline",
            "-",
            1,
            opts.reps as u64,
            median,
        ));
    }

    records.sort_by(|a, b| {
        (&a.algorithm, a.threads, a.size).cmp(&(&b.algorithm, b.threads, b.size))
    });
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast_opts() -> BenchOpts {
        BenchOpts { size: Some(1 << 12), ..BenchOpts::default() }
    }

    #[test]
    fn geometry_rows_mirror_the_table_shape() {
        let records = run_suite(Suite::Geometry, &fast_opts()).unwrap();
        let has = |alg: &str, x: u64| records.iter().any(|r| r.algorithm == alg && r.size == x);
        assert!(has("r16-best", 16));
        assert!(has("r16-best", 64));
        assert!(has("r4", 4));
        assert!(has("r32", 64));
        assert!(!has("r4", 32), "invalid cell must be absent");
        assert!(!has("r32", 128), "sweep stops at 64");
        assert!(records.iter().all(|r| r.runtime_us > 0.0));
        assert_eq!(records.iter().filter(|r| r.algorithm == "r16").count(), 3);
    }

    #[test]
    fn kernel_rows_cover_all_kernels_and_lengths() {
        let records = run_suite(Suite::Kernels, &fast_opts()).unwrap();
        assert_eq!(records.len(), 9);
        assert!(records
            .iter()
            .any(|r| r.algorithm == "hybrid-kernel" && r.size == 32));
        assert!(records.iter().any(|r| r.algorithm == "serial-kernel"));
        assert!(records.iter().all(|r| r.rate_me_s.is_finite() && r.rate_me_s > 0.0));
    }

    #[test]
    fn overall_rows_cover_algorithms_and_are_sorted() {
        let opts = BenchOpts { size: Some(10_000), threads: 2, ..BenchOpts::default() };
        let records = run_suite(Suite::Overall, &opts).unwrap();
        assert!(records.iter().any(|r| r.algorithm == "baseline" && r.threads == 1));
        assert!(records.iter().any(|r| r.algorithm == "neon-ms" && r.threads == 1));
        assert!(records.iter().any(|r| r.algorithm == "neon-ms" && r.threads == 2));
        assert!(records.iter().all(|r| r.reps == 5));
        let keys: Vec<_> =
            records.iter().map(|r| (r.algorithm.clone(), r.threads, r.size)).collect();
        let mut sorted_keys = keys.clone();
        sorted_keys.sort();
        assert_eq!(keys, sorted_keys);
    }

    #[test]
    fn overall_default_sizes_match_the_sweep() {
        assert_eq!(
            default_overall_sizes(),
            vec![1 << 9, 1 << 12, 1 << 15, 1 << 18, 1 << 21, 1 << 24, 1 << 27]
        );
    }

    #[test]
    fn reps_below_five_are_rejected() {
        let opts = BenchOpts { reps: 2, ..fast_opts() };
        assert!(run_suite(Suite::Kernels, &opts).is_err());
    }

    #[test]
    fn fingerprint_is_order_independent() {
        let a = [3, 1, 2, 2];
        let b = [2, 2, 3, 1];
        assert_eq!(multiset_fingerprint(&a), multiset_fingerprint(&b));
        assert_ne!(multiset_fingerprint(&a), multiset_fingerprint(&[3, 1, 2]));
    }
}
