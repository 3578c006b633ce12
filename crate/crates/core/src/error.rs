use thiserror::Error;

/// Errors reported by network construction, block operations and the merge
/// and sort entry points.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("channel count {0} must be a power of two in 2..=64")]
    InvalidChannelCount(usize),

    #[error("zero-one verification supports at most 24 channels, got {0}")]
    TooManyChannelsForZeroOne(usize),

    #[error("expected {expected} elements, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("comparator ({lo},{hi}) is invalid for {n} channels")]
    InvalidComparator { lo: usize, hi: usize, n: usize },

    #[error("channel {0} used twice within one layer")]
    ChannelReuseInLayer(usize),

    #[error("network has {net} channels but block has {rows} rows")]
    ChannelCountMismatch { net: usize, rows: usize },

    #[error("base transpose requires a square block, got {r}x{w}")]
    NonSquareBlock { r: usize, w: usize },

    #[error("row count {r} must be a multiple of lane count {w}")]
    RowsNotMultipleOfLanes { r: usize, w: usize },

    #[error("invalid block geometry {r}x{w}: {reason}")]
    InvalidGeometry { r: usize, w: usize, reason: &'static str },

    #[error("merge kernel length {0} must be a power of two in 2..={max}", max = crate::merge::MAX_KERNEL_LEN)]
    InvalidKernelLen(usize),

    #[error("lane width {0} must be a nonzero power of two")]
    InvalidLaneWidth(usize),

    #[error("merge kernel runs must have equal length, got {0} and {1}")]
    UnequalRuns(usize, usize),

    #[error("output buffer holds {actual} elements but {required} are required")]
    OutputTooSmall { required: usize, actual: usize },

    #[error("rank {k} out of range 0..={max}")]
    RankOutOfRange { k: usize, max: usize },
}
