//! The R-by-W register block: R rows model R vector registers of W lanes
//! each. Column sort runs a comparator network lane-parallel across rows;
//! the asymmetric transpose turns sorted columns into contiguous runs.

use crate::error::Error;
use crate::lanes::{LaneBackend, Lanes};
use crate::network::ComparatorNetwork;

/// An `r` by `w` matrix of 32-bit elements stored row-major, one row per
/// modeled vector register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    data: Vec<i32>,
    r: usize,
    w: usize,
}

impl Block {
    pub fn from_slice(r: usize, w: usize, data: &[i32]) -> Result<Self, Error> {
        if r == 0 || w == 0 {
            return Err(Error::InvalidGeometry { r, w, reason: "rows and lanes must be nonzero" });
        }
        if data.len() != r * w {
            return Err(Error::LengthMismatch { expected: r * w, actual: data.len() });
        }
        Ok(Block { data: data.to_vec(), r, w })
    }

    /// Reloads the block contents in place, reusing the allocation.
    pub fn copy_from_slice(&mut self, data: &[i32]) -> Result<(), Error> {
        if data.len() != self.r * self.w {
            return Err(Error::LengthMismatch { expected: self.r * self.w, actual: data.len() });
        }
        self.data.copy_from_slice(data);
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.r
    }

    pub fn lanes(&self) -> usize {
        self.w
    }

    pub fn row(&self, i: usize) -> &[i32] {
        &self.data[i * self.w..(i + 1) * self.w]
    }

    /// Column `j` from top row to bottom row.
    pub fn column(&self, j: usize) -> Vec<i32> {
        (0..self.r).map(|i| self.data[i * self.w + j]).collect()
    }

    pub fn as_flat(&self) -> &[i32] {
        &self.data
    }

    /// Sorts every column by running `net` across the rows: one comparator
    /// `(lo,hi)` becomes a lane-parallel min/max between row `lo` and row
    /// `hi`, so all `w` columns are sorted simultaneously.
    pub fn column_sort(&mut self, net: &ComparatorNetwork, backend: LaneBackend) -> Result<(), Error> {
        if net.channels() != self.r {
            return Err(Error::ChannelCountMismatch { net: net.channels(), rows: self.r });
        }
        let lanes = Lanes::new(backend, self.w);
        let w = self.w;
        for c in net.comparators() {
            let (head, tail) = self.data.split_at_mut(c.hi * w);
            lanes.minmax(&mut head[c.lo * w..c.lo * w + w], &mut tail[..w]);
        }
        Ok(())
    }

    /// Square transpose: `out[i][j] = in[j][i]`. This is the atomic step the
    /// asymmetric transpose is built from.
    pub fn transpose_base(&self) -> Result<Block, Error> {
        if self.r != self.w {
            return Err(Error::NonSquareBlock { r: self.r, w: self.w });
        }
        let w = self.w;
        let mut data = vec![0; w * w];
        for i in 0..w {
            for j in 0..w {
                data[i * w + j] = self.data[j * w + i];
            }
        }
        Ok(Block { data, r: w, w })
    }

    /// Asymmetric transpose of an `r` by `w` block with `w | r`, decomposed
    /// into `r/w` base transposes. Column `j` of the input lands contiguously
    /// on output rows `j*r/w ..= (j+1)*r/w - 1`, so a column-sorted block
    /// flattens into `w` ascending runs of length `r`.
    pub fn transpose_rw(&self) -> Result<Block, Error> {
        let mut out = Block { data: vec![0; self.r * self.w], r: self.r, w: self.w };
        self.transpose_rw_into(&mut out)?;
        Ok(out)
    }

    /// Allocation-free form of [`Block::transpose_rw`].
    pub fn transpose_rw_into(&self, out: &mut Block) -> Result<(), Error> {
        if self.r % self.w != 0 {
            return Err(Error::RowsNotMultipleOfLanes { r: self.r, w: self.w });
        }
        if out.r != self.r || out.w != self.w {
            return Err(Error::LengthMismatch { expected: self.r * self.w, actual: out.r * out.w });
        }
        let w = self.w;
        let ratio = self.r / w;
        for t in 0..ratio {
            // Base-transpose of sub-block t (rows t*w .. t*w+w); its row j is
            // register j*ratio + t of the result.
            for j in 0..w {
                for s in 0..w {
                    out.data[(j * ratio + t) * w + s] = self.data[(t * w + s) * w + j];
                }
            }
        }
        Ok(())
    }
}
