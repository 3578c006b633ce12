//! Single-thread sort pipeline: blocks of R*W elements are sorted entirely
//! in the register block (column sort, transpose, row merges), then runs are
//! merged bottom-up until one remains.

use std::sync::OnceLock;

use crate::block::Block;
use crate::error::Error;
use crate::lanes::LaneBackend;
use crate::merge::{merge_kernel_in_place, merge_runs, MergeKernel, MAX_KERNEL_LEN};
use crate::network::{best16_sorter, odd_even_sorter, ComparatorNetwork};

/// Geometry and execution choices for the sort pipeline. The in-register
/// threshold is always `r * w` elements, one full register block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SortConfig {
    pub r: usize,
    pub w: usize,
    pub kernel: MergeKernel,
    pub backend: LaneBackend,
}

impl SortConfig {
    /// Validates the geometry: `r` and `w` powers of two, `w | r`,
    /// `2 <= r <= 64`, and a block no larger than the merge kernel cap.
    pub fn new(r: usize, w: usize, kernel: MergeKernel, backend: LaneBackend) -> Result<Self, Error> {
        if r < 2 || r > 64 || !r.is_power_of_two() {
            return Err(Error::InvalidGeometry { r, w, reason: "r must be a power of two in 2..=64" });
        }
        if w == 0 || !w.is_power_of_two() {
            return Err(Error::InvalidLaneWidth(w));
        }
        if r % w != 0 {
            return Err(Error::RowsNotMultipleOfLanes { r, w });
        }
        if r * w > MAX_KERNEL_LEN {
            return Err(Error::InvalidGeometry { r, w, reason: "block exceeds merge kernel capacity" });
        }
        Ok(SortConfig { r, w, kernel, backend })
    }

    pub fn with_geometry(r: usize, w: usize) -> Result<Self, Error> {
        Self::new(r, w, MergeKernel::default(), LaneBackend::default())
    }

    /// Block size in elements; inputs at least this long go through the
    /// in-register path.
    pub fn block_len(&self) -> usize {
        self.r * self.w
    }
}

impl Default for SortConfig {
    fn default() -> Self {
        SortConfig { r: 16, w: 4, kernel: MergeKernel::default(), backend: LaneBackend::default() }
    }
}

// Cached column networks per register count; index is log2(r).
static COLUMN_NETS: [OnceLock<ComparatorNetwork>; 7] = [const { OnceLock::new() }; 7];

/// The column network the pipeline uses by default: the 60-comparator best
/// network when 16 registers are stacked, Batcher odd-even otherwise.
pub fn default_column_network(r: usize) -> Result<&'static ComparatorNetwork, Error> {
    if r < 2 || r > 64 || !r.is_power_of_two() {
        return Err(Error::InvalidChannelCount(r));
    }
    Ok(COLUMN_NETS[r.trailing_zeros() as usize].get_or_init(|| {
        if r == 16 {
            best16_sorter()
        } else {
            odd_even_sorter(r).expect("r validated as power of two in range")
        }
    }))
}

/// Reusable in-register sort state: one register block plus its transpose
/// target, so sorting many blocks does not reallocate.
pub struct InRegisterSorter {
    cfg: SortConfig,
    block: Block,
    transposed: Block,
}

impl InRegisterSorter {
    pub fn new(cfg: &SortConfig) -> Self {
        let zeros = vec![0; cfg.block_len()];
        let block = Block::from_slice(cfg.r, cfg.w, &zeros).expect("validated geometry");
        let transposed = block.clone();
        InRegisterSorter { cfg: *cfg, block, transposed }
    }

    /// Fully sorts one `r*w`-element block in place.
    pub fn sort(&mut self, data: &mut [i32], net: &ComparatorNetwork) -> Result<(), Error> {
        self.sort_to_run_len(data, net, self.cfg.block_len())
    }

    /// Runs the in-register pipeline only until every `target_run_len`
    /// elements are in order: column sort and transpose yield runs of `r`,
    /// then row-merge passes double the run length. This is the timing hook
    /// for the geometry sweep.
    pub fn sort_to_run_len(
        &mut self,
        data: &mut [i32],
        net: &ComparatorNetwork,
        target_run_len: usize,
    ) -> Result<(), Error> {
        let cfg = self.cfg;
        if data.len() != cfg.block_len() {
            return Err(Error::LengthMismatch { expected: cfg.block_len(), actual: data.len() });
        }
        if target_run_len > cfg.block_len() {
            return Err(Error::LengthMismatch { expected: cfg.block_len(), actual: target_run_len });
        }
        self.block.copy_from_slice(data)?;
        self.block.column_sort(net, cfg.backend)?;
        self.block.transpose_rw_into(&mut self.transposed)?;
        data.copy_from_slice(self.transposed.as_flat());

        let mut run_len = cfg.r;
        while run_len < target_run_len {
            for pair in data.chunks_exact_mut(2 * run_len) {
                merge_kernel_in_place(pair, cfg.kernel, cfg.backend, cfg.w)?;
            }
            run_len *= 2;
        }
        Ok(())
    }
}

/// Sorts one full block of `cfg.block_len()` elements in place.
pub fn in_register_sort(data: &mut [i32], cfg: &SortConfig) -> Result<(), Error> {
    let net = default_column_network(cfg.r)?;
    InRegisterSorter::new(cfg).sort(data, net)
}

/// Sorts `data` ascending on the calling thread.
///
/// Whole blocks go through the in-register path; a trailing partial block is
/// padded with the maximal sentinel, block-sorted, and truncated. Runs are
/// then merged pairwise bottom-up, ping-ponging between `data` and one
/// scratch buffer. The sort is not stable.
pub fn sort_single(data: &mut [i32], cfg: &SortConfig) {
    let n = data.len();
    let block_len = cfg.block_len();
    if n <= 1 {
        return;
    }
    let net = default_column_network(cfg.r).expect("validated geometry");
    let mut sorter = InRegisterSorter::new(cfg);
    for block in data.chunks_exact_mut(block_len) {
        sorter.sort(block, net).expect("block length matches geometry");
    }
    let tail = n % block_len;
    if tail > 0 {
        let mut padded = vec![i32::MAX; block_len];
        padded[..tail].copy_from_slice(&data[n - tail..]);
        sorter.sort(&mut padded, net).expect("block length matches geometry");
        data[n - tail..].copy_from_slice(&padded[..tail]);
    }

    let mut scratch = vec![0; n];
    let mut run_len = block_len;
    let mut in_data = true;
    while run_len < n {
        if in_data {
            merge_pass(data, &mut scratch, run_len, cfg);
        } else {
            merge_pass(&scratch, data, run_len, cfg);
        }
        in_data = !in_data;
        run_len *= 2;
    }
    if !in_data {
        data.copy_from_slice(&scratch);
    }
}

/// One bottom-up pass: merge adjacent run pairs of length `run_len` from
/// `src` into `dst`; an unpaired final run is copied through.
fn merge_pass(src: &[i32], dst: &mut [i32], run_len: usize, cfg: &SortConfig) {
    let n = src.len();
    let mut start = 0;
    while start < n {
        let mid = (start + run_len).min(n);
        let end = (start + 2 * run_len).min(n);
        if mid < end {
            merge_runs(&src[start..mid], &src[mid..end], cfg.kernel, cfg.backend, cfg.w, &mut dst[start..end])
                .expect("dst sized to the pair");
        } else {
            dst[start..end].copy_from_slice(&src[start..end]);
        }
        start = end;
    }
}
