//! Multi-thread sort: every worker locally sorts an equal chunk, then each
//! merge pass is cut into equal output segments by merge-path co-ranking so
//! all workers stay busy. Workers are forked once and synchronize on a
//! barrier between passes; the plan for each pass is computed single-threaded
//! and workers write only their own disjoint output ranges.

use std::ops::Range;
use std::sync::{Arc, Barrier, Mutex};
use std::thread;

use crate::error::Error;
use crate::merge::merge_runs;
use crate::sorter::{sort_single, SortConfig};

/// Splits the merge of two ascending runs at output rank `k`: returns
/// `(i, j)` with `i + j = k` such that `a[..i]` and `b[..j]` are exactly the
/// `k` smallest elements of the union, ties taken from `a` first.
///
/// Binary search, `O(log min(|a|, |b|))`.
pub fn corank_partition(a: &[i32], b: &[i32], k: usize) -> Result<(usize, usize), Error> {
    if k > a.len() + b.len() {
        return Err(Error::RankOutOfRange { k, max: a.len() + b.len() });
    }
    let mut lo = k.saturating_sub(b.len());
    let mut hi = k.min(a.len());
    // Smallest i such that b[k-i-1] < a[i] (whenever both exist); the
    // companion condition a[i-1] <= b[k-i] then holds automatically.
    while lo < hi {
        let i = lo + (hi - lo) / 2;
        let j = k - i;
        if j > 0 && i < a.len() && a[i] <= b[j - 1] {
            lo = i + 1;
        } else {
            hi = i;
        }
    }
    Ok((lo, k - lo))
}

/// One worker's share of one merge pass: merge `src[src_a]` with
/// `src[src_b]` into `dst[out]`. An unpaired trailing run shows up as
/// segments with an empty `src_b`, i.e. a plain copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeSegment {
    pub worker: usize,
    pub src_a: Range<usize>,
    pub src_b: Range<usize>,
    pub out: Range<usize>,
}

/// Chunking and per-pass segmentation for a parallel sort over `len`
/// elements and a fixed worker count.
#[derive(Debug, Clone)]
pub struct ParallelPlan {
    pub workers: usize,
    /// `workers + 1` offsets; chunk sizes differ by at most one.
    pub chunk_bounds: Vec<usize>,
}

impl ParallelPlan {
    pub fn new(len: usize, workers: usize) -> Self {
        let workers = workers.max(1);
        ParallelPlan { workers, chunk_bounds: chunk_boundaries(len, workers) }
    }

    /// Cuts every adjacent run pair of this pass into `workers` equal output
    /// segments. `run_bounds` are offsets into `src`; runs are the gaps
    /// between consecutive offsets.
    pub fn merge_pass_segments(&self, src: &[i32], run_bounds: &[usize]) -> Vec<MergeSegment> {
        let mut segments = Vec::new();
        let runs = run_bounds.len() - 1;
        let mut q = 0;
        while q + 1 < runs {
            let (a0, a1, b1) = (run_bounds[q], run_bounds[q + 1], run_bounds[q + 2]);
            let a = &src[a0..a1];
            let b = &src[a1..b1];
            let total = b1 - a0;
            let mut prev = corank_partition(a, b, 0).expect("rank 0 in range");
            for s in 0..self.workers {
                let r0 = s * total / self.workers;
                let r1 = (s + 1) * total / self.workers;
                let next = corank_partition(a, b, r1).expect("rank within merged length");
                segments.push(MergeSegment {
                    worker: s,
                    src_a: a0 + prev.0..a0 + next.0,
                    src_b: a1 + prev.1..a1 + next.1,
                    out: a0 + r0..a0 + r1,
                });
                prev = next;
            }
            q += 2;
        }
        if q < runs {
            // Odd run out: carried forward unchanged, split for balance.
            let (s0, s1) = (run_bounds[q], run_bounds[q + 1]);
            let total = s1 - s0;
            for s in 0..self.workers {
                let r0 = s * total / self.workers;
                let r1 = (s + 1) * total / self.workers;
                segments.push(MergeSegment {
                    worker: s,
                    src_a: s0 + r0..s0 + r1,
                    src_b: s1..s1,
                    out: s0 + r0..s0 + r1,
                });
            }
        }
        segments
    }
}

/// `workers + 1` offsets covering `0..len` with chunk sizes differing by at
/// most one.
pub fn chunk_boundaries(len: usize, workers: usize) -> Vec<usize> {
    (0..=workers).map(|i| i * len / workers).collect()
}

struct PassTasks {
    segments: Vec<MergeSegment>,
    src_is_data: bool,
    done: bool,
}

/// Raw views of the two ping-pong buffers. Workers only ever write inside
/// their own plan ranges, which are disjoint by construction.
struct Buffers {
    data: *mut i32,
    scratch: *mut i32,
    len: usize,
}

unsafe impl Sync for Buffers {}

impl Buffers {
    /// # Safety
    /// Callers must hold ranges disjoint from every concurrent writer.
    unsafe fn slice_mut(&self, in_data: bool, range: &Range<usize>) -> &mut [i32] {
        let base = if in_data { self.data } else { self.scratch };
        std::slice::from_raw_parts_mut(base.add(range.start), range.len())
    }

    /// # Safety
    /// No thread may be writing to the selected buffer while the view lives.
    unsafe fn full(&self, in_data: bool) -> &[i32] {
        let base = if in_data { self.data } else { self.scratch };
        std::slice::from_raw_parts(base as *const i32, self.len)
    }
}

/// Workers are clamped so each owns at least this many elements; below that
/// the spawn and barrier overhead dwarfs the sort itself.
pub const MIN_PARALLEL_CHUNK: usize = 4096;

fn effective_workers(requested: usize, len: usize) -> usize {
    let hw = if requested == 0 {
        thread::available_parallelism().map(usize::from).unwrap_or(1)
    } else {
        requested
    };
    hw.min(len.div_ceil(MIN_PARALLEL_CHUNK)).max(1)
}

/// Sorts `data` ascending with up to `workers` threads; `workers == 0` uses
/// the available hardware parallelism. The output is value-identical to
/// [`sort_single`] for every worker count.
pub fn sort_parallel(data: &mut [i32], cfg: &SortConfig, workers: usize) {
    sort_parallel_with_workers(data, cfg, effective_workers(workers, data.len()));
}

fn sort_parallel_with_workers(data: &mut [i32], cfg: &SortConfig, t: usize) {
    let n = data.len();
    if t <= 1 || n <= 1 {
        sort_single(data, cfg);
        return;
    }

    let plan = ParallelPlan::new(n, t);
    let mut scratch = vec![0i32; n];
    let bufs = Buffers { data: data.as_mut_ptr(), scratch: scratch.as_mut_ptr(), len: n };
    let barrier = Barrier::new(t + 1);
    let tasks: Mutex<Option<Arc<PassTasks>>> = Mutex::new(None);
    let mut result_in_data = true;

    thread::scope(|scope| {
        for worker in 0..t {
            let chunk = plan.chunk_bounds[worker]..plan.chunk_bounds[worker + 1];
            let (bufs, barrier, tasks) = (&bufs, &barrier, &tasks);
            scope.spawn(move || {
                // Local sort of this worker's chunk; chunks are disjoint.
                let slice = unsafe { bufs.slice_mut(true, &chunk) };
                sort_single(slice, cfg);
                barrier.wait();
                loop {
                    barrier.wait(); // pass published
                    let pass = tasks.lock().unwrap().clone().expect("pass published");
                    if pass.done {
                        break;
                    }
                    for seg in pass.segments.iter().filter(|s| s.worker == worker) {
                        // SAFETY: out ranges of one pass are disjoint across
                        // segments and nobody writes the source buffer.
                        unsafe {
                            let src = bufs.full(pass.src_is_data);
                            let dst = bufs.slice_mut(!pass.src_is_data, &seg.out);
                            merge_runs(
                                &src[seg.src_a.clone()],
                                &src[seg.src_b.clone()],
                                cfg.kernel,
                                cfg.backend,
                                cfg.w,
                                dst,
                            )
                            .expect("plan ranges sized to the segment");
                        }
                    }
                    barrier.wait(); // pass complete
                }
            });
        }

        // Coordinator: plan each pass single-threaded between barriers.
        barrier.wait(); // local sorts complete
        let mut run_bounds = plan.chunk_bounds.clone();
        let mut src_is_data = true;
        while run_bounds.len() > 2 {
            let segments = {
                // SAFETY: all workers are parked at the pass barrier.
                let src = unsafe { bufs.full(src_is_data) };
                plan.merge_pass_segments(src, &run_bounds)
            };
            *tasks.lock().unwrap() =
                Some(Arc::new(PassTasks { segments, src_is_data, done: false }));
            barrier.wait(); // release workers into the pass
            barrier.wait(); // wait for completion

            let mut next: Vec<usize> = run_bounds.iter().copied().step_by(2).collect();
            if *next.last().unwrap() != n {
                next.push(n);
            }
            run_bounds = next;
            src_is_data = !src_is_data;
        }
        *tasks.lock().unwrap() =
            Some(Arc::new(PassTasks { segments: Vec::new(), src_is_data, done: true }));
        barrier.wait();
        result_in_data = src_is_data;
    });

    if !result_in_data {
        data.copy_from_slice(&scratch);
    }
}
