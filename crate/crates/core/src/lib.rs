//! A merge-sort library built from comparator networks: few-comparator
//! column sort over an R-by-W register block, an asymmetric in-register
//! transpose, a hybrid serial/vectorized bitonic merger, and a load-balanced
//! multi-thread merge. A scalar lane-emulation backend makes the whole
//! pipeline verifiable on any host; the native backend maps lane operations
//! onto 128-bit SIMD.
//!
//! Entry points: [`sort_single`] for one thread, [`sort_parallel`] for many.

pub mod block;
pub mod error;
pub mod lanes;
pub mod merge;
pub mod network;
pub mod parallel;
pub mod sorter;

pub use block::Block;
pub use error::Error;
pub use lanes::LaneBackend;
pub use merge::{
    comparator_branchless, is_ascending, merge_kernel, merge_kernel_into, merge_runs, MergeKernel,
    DEFAULT_LANE_WIDTH, MAX_KERNEL_LEN,
};
pub use network::{
    best16_sorter, bitonic_merge_network, bitonic_sorter, odd_even_sorter, Comparator,
    ComparatorNetwork,
};
pub use parallel::{
    chunk_boundaries, corank_partition, sort_parallel, MergeSegment, ParallelPlan,
    MIN_PARALLEL_CHUNK,
};
pub use sorter::{in_register_sort, sort_single, InRegisterSorter, SortConfig};
