//! Bitonic merging: a serial branchless kernel, a vectorized kernel, and the
//! hybrid kernel that runs the two independent tail halves of the network
//! under both implementations at once so their instruction streams
//! interleave. On top of the fixed-size kernels sits a streaming merge for
//! runs of arbitrary length.

use crate::error::Error;
use crate::lanes::{LaneBackend, Lanes};

/// Largest kernel the fixed-size merge accepts: four blocks of the default
/// 16x4 geometry.
pub const MAX_KERNEL_LEN: usize = 256;

/// Lane width used by the convenience entry points (32-bit elements in
/// 128-bit registers).
pub const DEFAULT_LANE_WIDTH: usize = 4;

/// Selects the bitonic-merge implementation. All three kinds execute the
/// same comparator network and produce identical outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MergeKernel {
    Serial,
    Vectorized,
    #[default]
    Hybrid,
}

impl MergeKernel {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "serial" => Some(MergeKernel::Serial),
            "vectorized" => Some(MergeKernel::Vectorized),
            "hybrid" => Some(MergeKernel::Hybrid),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MergeKernel::Serial => "serial",
            MergeKernel::Vectorized => "vectorized",
            MergeKernel::Hybrid => "hybrid",
        }
    }

    /// Default kernel for a given in-flight window length. The hybrid kernel
    /// wins up to 32 elements; above that its serial half spills past the
    /// register budget, so the vectorized kernel is preferred.
    pub fn preferred_for_window(window_len: usize) -> MergeKernel {
        if window_len <= 32 {
            MergeKernel::Hybrid
        } else {
            MergeKernel::Vectorized
        }
    }
}

/// Branchless compare-exchange: `(min, max)` via select semantics, no
/// data-dependent branch.
#[inline]
pub fn comparator_branchless(a: i32, b: i32) -> (i32, i32) {
    (a.min(b), a.max(b))
}

pub fn is_ascending(xs: &[i32]) -> bool {
    xs.windows(2).all(|p| p[0] <= p[1])
}

/// Receives every comparator a kernel executes; lets tests assert that all
/// kernels schedule exactly the comparators of the merge network.
pub(crate) trait CompSink {
    /// Tracing sinks pin execution to the generic schedule walker; the
    /// register-resident fast path is only taken when this is false.
    const TRACING: bool;

    fn record(&mut self, lo: usize, hi: usize);
}

pub(crate) struct NoTrace;

impl CompSink for NoTrace {
    const TRACING: bool = false;

    #[inline(always)]
    fn record(&mut self, _lo: usize, _hi: usize) {}
}

impl CompSink for Vec<(usize, usize)> {
    const TRACING: bool = true;

    fn record(&mut self, lo: usize, hi: usize) {
        self.push((lo, hi));
    }
}

#[inline]
fn cswap<S: CompSink>(buf: &mut [i32], lo: usize, hi: usize, sink: &mut S) {
    sink.record(lo, hi);
    let (a, b) = comparator_branchless(buf[lo], buf[hi]);
    buf[lo] = a;
    buf[hi] = b;
}

/// Serial execution of the whole merge network with branchless comparators.
fn run_serial<S: CompSink>(buf: &mut [i32], sink: &mut S) {
    let n = buf.len();
    for i in 0..n / 2 {
        cswap(buf, i, n - 1 - i, sink);
    }
    let mut j = n / 4;
    while j >= 1 {
        serial_halving(buf, 0, n, j, sink);
        j /= 2;
    }
}

/// One halving layer, executed serially on channels `start..end`.
fn serial_halving<S: CompSink>(buf: &mut [i32], start: usize, end: usize, j: usize, sink: &mut S) {
    for i in start..end {
        if i & j == 0 {
            cswap(buf, i, i + j, sink);
        }
    }
}

#[inline]
fn row_pair_mut(buf: &mut [i32], w: usize, r1: usize, r2: usize) -> (&mut [i32], &mut [i32]) {
    debug_assert!(r1 < r2);
    let (head, tail) = buf.split_at_mut(r2 * w);
    (&mut head[r1 * w..r1 * w + w], &mut tail[..w])
}

/// Reflection layer over rows `0..nrows`: row r against row nrows-1-r with
/// reversed lanes.
fn vector_reflection<S: CompSink>(buf: &mut [i32], w: usize, lanes: Lanes, sink: &mut S) {
    let nrows = buf.len() / w;
    let n = buf.len();
    for r in 0..nrows / 2 {
        let r2 = nrows - 1 - r;
        for l in 0..w {
            sink.record(r * w + l, n - 1 - (r * w + l));
        }
        let (a, b) = row_pair_mut(buf, w, r, r2);
        lanes.reflect_minmax(a, b);
    }
}

/// One halving layer at distance `j`, executed with row and in-row lane ops
/// over channels `start..start+len`. `start` and `len` must be row-aligned.
fn vector_halving<S: CompSink>(
    buf: &mut [i32],
    start: usize,
    len: usize,
    w: usize,
    j: usize,
    lanes: Lanes,
    sink: &mut S,
) {
    let region = &mut buf[start..start + len];
    if j >= w {
        let dj = j / w;
        let nrows = len / w;
        for r in 0..nrows {
            if r & dj == 0 {
                for l in 0..w {
                    sink.record(start + r * w + l, start + (r + dj) * w + l);
                }
                let (a, b) = row_pair_mut(region, w, r, r + dj);
                lanes.minmax(a, b);
            }
        }
    } else {
        for r in 0..len / w {
            for l in 0..w {
                if l & j == 0 {
                    sink.record(start + r * w + l, start + r * w + l + j);
                }
            }
            lanes.intra(&mut region[r * w..(r + 1) * w], j);
        }
    }
}

fn run_vectorized<S: CompSink>(buf: &mut [i32], w: usize, backend: LaneBackend, sink: &mut S) {
    let w = w.min(buf.len() / 2);
    run_vectorized_on(buf, w, Lanes::new(backend, w), sink);
}

/// Vectorized schedule with the lane dispatch already resolved.
fn run_vectorized_on<S: CompSink>(buf: &mut [i32], w: usize, lanes: Lanes, sink: &mut S) {
    #[cfg(target_arch = "x86_64")]
    if !S::TRACING && w == 4 && lanes.is_native() {
        // SAFETY: is_native implies SSE4.1 was detected at dispatch time.
        unsafe { x86_kernels::vectorized_w4(buf) };
        return;
    }
    let n = buf.len();
    vector_reflection(buf, w, lanes, sink);
    let mut j = n / 4;
    while j >= 1 {
        vector_halving(buf, 0, n, w, j, lanes, sink);
        j /= 2;
    }
}

/// Hybrid schedule: the first `split_after` layers run vectorized over the
/// whole width; from there the network has decomposed into independent
/// halves, and each remaining layer runs the lower half vectorized and the
/// upper half serial so the two instruction streams interleave.
fn run_hybrid<S: CompSink>(
    buf: &mut [i32],
    w: usize,
    backend: LaneBackend,
    split_after: usize,
    sink: &mut S,
) {
    let w = w.min(buf.len() / 2);
    run_hybrid_on(buf, w, Lanes::new(backend, w), split_after, sink);
}

fn run_hybrid_on<S: CompSink>(
    buf: &mut [i32],
    w: usize,
    lanes: Lanes,
    split_after: usize,
    sink: &mut S,
) {
    #[cfg(target_arch = "x86_64")]
    if !S::TRACING && w == 4 && lanes.is_native() {
        // SAFETY: is_native implies SSE4.1 was detected at dispatch time.
        unsafe { x86_kernels::hybrid_w4(buf, split_after) };
        return;
    }
    let n = buf.len();
    let split_after = split_after.max(1);

    vector_reflection(buf, w, lanes, sink);
    let mut j = n / 4;
    let mut layer = 2;
    while j >= 1 && layer <= split_after {
        vector_halving(buf, 0, n, w, j, lanes, sink);
        j /= 2;
        layer += 1;
    }
    while j >= 1 {
        vector_halving(buf, 0, n / 2, w, j, lanes, sink);
        serial_halving(buf, n / 2, n, j, sink);
        j /= 2;
    }
}

/// Whole-kernel SSE4.1 paths holding all rows in 128-bit registers, so the
/// network runs without a memory round-trip per comparator layer. Outputs
/// are bit-identical to the generic schedule walker.
#[cfg(target_arch = "x86_64")]
mod x86_kernels {
    use std::arch::x86_64::*;

    use super::{comparator_branchless, MAX_KERNEL_LEN};

    const MAX_ROWS: usize = MAX_KERNEL_LEN / 4;

    #[inline]
    #[target_feature(enable = "sse4.1")]
    unsafe fn intra2(v: __m128i) -> __m128i {
        let sh = _mm_shuffle_epi32(v, 0x4E); // lanes 2,3,0,1
        _mm_blend_epi16(_mm_min_epi32(v, sh), _mm_max_epi32(v, sh), 0xF0)
    }

    #[inline]
    #[target_feature(enable = "sse4.1")]
    unsafe fn intra1(v: __m128i) -> __m128i {
        let sh = _mm_shuffle_epi32(v, 0xB1); // lanes 1,0,3,2
        _mm_blend_epi16(_mm_min_epi32(v, sh), _mm_max_epi32(v, sh), 0xCC)
    }

    /// One halving layer at comparator distance `j` over a row region that
    /// starts at channel 0 of itself.
    #[inline]
    #[target_feature(enable = "sse4.1")]
    unsafe fn halving_layer(rows: &mut [__m128i], j: usize) {
        if j >= 4 {
            let dj = j / 4;
            for r in 0..rows.len() {
                if r & dj == 0 {
                    let (a, b) = (rows[r], rows[r + dj]);
                    rows[r] = _mm_min_epi32(a, b);
                    rows[r + dj] = _mm_max_epi32(a, b);
                }
            }
        } else if j == 2 {
            for row in rows.iter_mut() {
                *row = intra2(*row);
            }
        } else {
            for row in rows.iter_mut() {
                *row = intra1(*row);
            }
        }
    }

    #[inline]
    #[target_feature(enable = "sse4.1")]
    unsafe fn reflection(rows: &mut [__m128i]) {
        let nrows = rows.len();
        for r in 0..nrows / 2 {
            let r2 = nrows - 1 - r;
            let rev = _mm_shuffle_epi32(rows[r2], 0x1B);
            let lo = _mm_min_epi32(rows[r], rev);
            let hi = _mm_max_epi32(rows[r], rev);
            rows[r] = lo;
            rows[r2] = _mm_shuffle_epi32(hi, 0x1B);
        }
    }

    #[inline]
    #[target_feature(enable = "sse4.1")]
    unsafe fn load_rows(buf: &[i32], rows: &mut [__m128i]) {
        for (r, row) in rows.iter_mut().enumerate() {
            *row = _mm_loadu_si128(buf.as_ptr().add(4 * r) as *const __m128i);
        }
    }

    #[inline]
    #[target_feature(enable = "sse4.1")]
    unsafe fn store_rows(buf: &mut [i32], rows: &[__m128i], from: usize, to: usize) {
        for r in from..to {
            _mm_storeu_si128(buf.as_mut_ptr().add(4 * r) as *mut __m128i, rows[r]);
        }
    }

    /// Rows 0..nrows of `buf` as an uninitialized register array; only the
    /// loaded prefix is ever touched.
    #[inline]
    #[target_feature(enable = "sse4.1")]
    unsafe fn rows_of<'a>(
        buf: &[i32],
        mem: &'a mut core::mem::MaybeUninit<[__m128i; MAX_ROWS]>,
        nrows: usize,
    ) -> &'a mut [__m128i] {
        let rows = core::slice::from_raw_parts_mut(mem.as_mut_ptr() as *mut __m128i, nrows);
        load_rows(buf, rows);
        rows
    }

    /// # Safety
    /// Requires SSE4.1 and `buf.len()` a power of two in `8..=MAX_KERNEL_LEN`.
    #[target_feature(enable = "sse4.1")]
    pub unsafe fn vectorized_w4(buf: &mut [i32]) {
        let n = buf.len();
        let nrows = n / 4;
        let mut mem = core::mem::MaybeUninit::uninit();
        let rows = rows_of(buf, &mut mem, nrows);
        reflection(rows);
        let mut j = n / 4;
        while j >= 1 {
            halving_layer(rows, j);
            j /= 2;
        }
        store_rows(buf, rows, 0, nrows);
    }

    /// # Safety
    /// Same requirements as [`vectorized_w4`].
    #[target_feature(enable = "sse4.1")]
    pub unsafe fn hybrid_w4(buf: &mut [i32], split_after: usize) {
        let n = buf.len();
        let nrows = n / 4;
        let split_after = split_after.max(1);
        let mut mem = core::mem::MaybeUninit::uninit();
        let rows = rows_of(buf, &mut mem, nrows);
        reflection(rows);
        let mut j = n / 4;
        let mut layer = 2;
        while j >= 1 && layer <= split_after {
            halving_layer(rows, j);
            j /= 2;
            layer += 1;
        }
        // The remaining layers stay inside the two independent halves: the
        // lower half keeps running in registers while the upper half runs
        // the serial branchless path, letting the streams interleave.
        store_rows(buf, rows, nrows / 2, nrows);
        while j >= 1 {
            halving_layer(&mut rows[..nrows / 2], j);
            for i in n / 2..n {
                if i & j == 0 {
                    let (lo, hi) = comparator_branchless(buf[i], buf[i + j]);
                    buf[i] = lo;
                    buf[i + j] = hi;
                }
            }
            j /= 2;
        }
        store_rows(buf, rows, 0, nrows / 2);
    }
}

fn run_kernel<S: CompSink>(
    buf: &mut [i32],
    kind: MergeKernel,
    backend: LaneBackend,
    w: usize,
    sink: &mut S,
) {
    match kind {
        MergeKernel::Serial => run_serial(buf, sink),
        MergeKernel::Vectorized => run_vectorized(buf, w, backend, sink),
        MergeKernel::Hybrid => run_hybrid(buf, w, backend, 1, sink),
    }
}

fn check_kernel_geometry(n: usize, w: usize) -> Result<(), Error> {
    if n < 2 || n > MAX_KERNEL_LEN || !n.is_power_of_two() {
        return Err(Error::InvalidKernelLen(n));
    }
    if w == 0 || !w.is_power_of_two() {
        return Err(Error::InvalidLaneWidth(w));
    }
    Ok(())
}

/// Merges two equal-length ascending runs already adjacent in `buf`.
pub fn merge_kernel_in_place(
    buf: &mut [i32],
    kind: MergeKernel,
    backend: LaneBackend,
    w: usize,
) -> Result<(), Error> {
    check_kernel_geometry(buf.len(), w)?;
    debug_assert!(is_ascending(&buf[..buf.len() / 2]), "first run not ascending");
    debug_assert!(is_ascending(&buf[buf.len() / 2..]), "second run not ascending");
    run_kernel(buf, kind, backend, w, &mut NoTrace);
    Ok(())
}

/// Merges ascending runs `a` and `b` (equal power-of-two lengths) into the
/// front of `out` with the selected kernel.
pub fn merge_kernel_into(
    a: &[i32],
    b: &[i32],
    kind: MergeKernel,
    backend: LaneBackend,
    w: usize,
    out: &mut [i32],
) -> Result<(), Error> {
    if a.len() != b.len() {
        return Err(Error::UnequalRuns(a.len(), b.len()));
    }
    let n = a.len() + b.len();
    if out.len() < n {
        return Err(Error::OutputTooSmall { required: n, actual: out.len() });
    }
    out[..a.len()].copy_from_slice(a);
    out[a.len()..n].copy_from_slice(b);
    merge_kernel_in_place(&mut out[..n], kind, backend, w)
}

/// Convenience form of [`merge_kernel_into`] at the default lane width and
/// emulated backend.
pub fn merge_kernel(a: &[i32], b: &[i32], kind: MergeKernel) -> Result<Vec<i32>, Error> {
    let mut out = vec![0; a.len() + b.len()];
    merge_kernel_into(a, b, kind, LaneBackend::Emulated, DEFAULT_LANE_WIDTH, &mut out)?;
    Ok(out)
}

/// Hybrid kernel with an explicit split layer, for experimentation. The
/// default hybrid splits after layer 1, the point where the network first
/// decomposes into two independent halves.
pub fn merge_kernel_hybrid_split(
    a: &[i32],
    b: &[i32],
    split_after: usize,
    backend: LaneBackend,
    w: usize,
    out: &mut [i32],
) -> Result<(), Error> {
    if a.len() != b.len() {
        return Err(Error::UnequalRuns(a.len(), b.len()));
    }
    let n = a.len() + b.len();
    check_kernel_geometry(n, w)?;
    if out.len() < n {
        return Err(Error::OutputTooSmall { required: n, actual: out.len() });
    }
    out[..a.len()].copy_from_slice(a);
    out[a.len()..n].copy_from_slice(b);
    run_hybrid(&mut out[..n], w, backend, split_after, &mut NoTrace);
    Ok(())
}

/// The comparators a kernel executes for an `n`-element merge, in execution
/// order. The schedule is data-independent; all kernels cover the same set.
pub fn kernel_comparator_trace(n: usize, kind: MergeKernel) -> Result<Vec<(usize, usize)>, Error> {
    check_kernel_geometry(n, DEFAULT_LANE_WIDTH)?;
    let mut buf = vec![0; n];
    let mut trace = Vec::new();
    run_kernel(&mut buf, kind, LaneBackend::Emulated, DEFAULT_LANE_WIDTH, &mut trace);
    Ok(trace)
}

/// Streaming merge of two ascending runs of arbitrary length into `out`.
///
/// Keeps a `2w`-element window in flight: the kernel merges the carried
/// upper half with the next `w` elements of whichever run's head is
/// smaller, emits the lower half, and a scalar drain finishes the tails.
pub fn merge_runs(
    a: &[i32],
    b: &[i32],
    kind: MergeKernel,
    backend: LaneBackend,
    w: usize,
    out: &mut [i32],
) -> Result<(), Error> {
    let total = a.len() + b.len();
    if out.len() < total {
        return Err(Error::OutputTooSmall { required: total, actual: out.len() });
    }
    if w == 0 || !w.is_power_of_two() || 2 * w > MAX_KERNEL_LEN {
        return Err(Error::InvalidLaneWidth(w));
    }
    debug_assert!(is_ascending(a), "run a not ascending");
    debug_assert!(is_ascending(b), "run b not ascending");
    let out = &mut out[..total];

    if a.len() < w || b.len() < w {
        drain3(&[], a, b, out);
        return Ok(());
    }

    // Resolve the kernel once; the window loop runs it per w elements.
    let lanes = Lanes::new(backend, w);
    match kind {
        MergeKernel::Serial => stream_merge(a, b, w, out, |k| run_serial(k, &mut NoTrace)),
        MergeKernel::Vectorized => {
            stream_merge(a, b, w, out, |k| run_vectorized_on(k, w, lanes, &mut NoTrace))
        }
        MergeKernel::Hybrid => {
            stream_merge(a, b, w, out, |k| run_hybrid_on(k, w, lanes, 1, &mut NoTrace))
        }
    }
    Ok(())
}

/// The 2w-element window loop of [`merge_runs`]; `kernel` merges the two
/// sorted halves of its argument in place.
fn stream_merge<F: FnMut(&mut [i32])>(a: &[i32], b: &[i32], w: usize, out: &mut [i32], mut kernel: F) {
    let mut window = [0i32; MAX_KERNEL_LEN];
    let kbuf = &mut window[..2 * w];
    kbuf[..w].copy_from_slice(&a[..w]);
    kbuf[w..].copy_from_slice(&b[..w]);
    let mut ai = w;
    let mut bi = w;
    let mut emitted = 0;

    loop {
        kernel(kbuf);
        out[emitted..emitted + w].copy_from_slice(&kbuf[..w]);
        emitted += w;
        kbuf.copy_within(w.., 0);

        // Refill from the run whose next element is smaller; stop once that
        // run cannot supply a full vector.
        let take_a = ai < a.len() && (bi >= b.len() || a[ai] <= b[bi]);
        if take_a {
            if a.len() - ai < w {
                break;
            }
            kbuf[w..].copy_from_slice(&a[ai..ai + w]);
            ai += w;
        } else {
            if b.len() - bi < w {
                break;
            }
            kbuf[w..].copy_from_slice(&b[bi..bi + w]);
            bi += w;
        }
    }

    drain3(&kbuf[..w], &a[ai..], &b[bi..], &mut out[emitted..]);
}

/// Scalar three-way merge of ascending sequences; used for the window drain
/// and for runs too short to fill a vector.
fn drain3(x: &[i32], y: &[i32], z: &[i32], out: &mut [i32]) {
    debug_assert_eq!(x.len() + y.len() + z.len(), out.len());
    let (mut i, mut j, mut k) = (0, 0, 0);
    for slot in out.iter_mut() {
        let mut src = usize::MAX;
        let mut best = 0;
        if i < x.len() {
            src = 0;
            best = x[i];
        }
        if j < y.len() && (src == usize::MAX || y[j] < best) {
            src = 1;
            best = y[j];
        }
        if k < z.len() && (src == usize::MAX || z[k] < best) {
            src = 2;
        }
        match src {
            0 => {
                *slot = x[i];
                i += 1;
            }
            1 => {
                *slot = y[j];
                j += 1;
            }
            _ => {
                *slot = z[k];
                k += 1;
            }
        }
    }
}
