//! Lane-level primitives behind the merge and block operations: element-wise
//! min/max between rows, the reflected compare used by merge networks, and
//! intra-row compare-exchange. Every operation has a scalar emulated form and
//! a 128-bit native form; both produce bit-identical results, so the full
//! suite runs on any host and the native path is a drop-in.

/// Selects how lane operations are executed.
///
/// `Native` uses 128-bit SIMD (SSE4.1 on x86_64, NEON on aarch64) for 4-lane
/// rows of 32-bit elements and silently falls back to the emulated path for
/// other widths or hosts without the required ISA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LaneBackend {
    #[default]
    Emulated,
    Native,
}

impl LaneBackend {
    /// Whether this host can execute the native 4-lane path.
    pub fn native_supported() -> bool {
        #[cfg(target_arch = "x86_64")]
        {
            std::arch::is_x86_feature_detected!("sse4.1")
        }
        #[cfg(target_arch = "aarch64")]
        {
            true
        }
        #[cfg(not(any(target_arch = "x86_64", target_arch = "aarch64")))]
        {
            false
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "emulated" => Some(LaneBackend::Emulated),
            "native" => Some(LaneBackend::Native),
            _ => None,
        }
    }
}

/// Resolved lane dispatcher: the backend/width decision is made once per
/// kernel invocation, not per row operation.
#[derive(Clone, Copy)]
pub(crate) struct Lanes {
    native: bool,
}

impl Lanes {
    #[inline]
    pub fn new(backend: LaneBackend, w: usize) -> Self {
        Lanes { native: backend == LaneBackend::Native && w == 4 && LaneBackend::native_supported() }
    }

    /// True when the 4-lane native path was selected at construction.
    #[inline]
    pub fn is_native(self) -> bool {
        self.native
    }

    /// Lane-wise compare-exchange: `a` keeps the minima, `b` the maxima.
    #[inline]
    pub fn minmax(self, a: &mut [i32], b: &mut [i32]) {
        debug_assert_eq!(a.len(), b.len());
        #[cfg(any(target_arch = "x86_64", target_arch = "aarch64"))]
        if self.native {
            // SAFETY: native is only set for w == 4 on a host with the ISA.
            unsafe { native::minmax4(a.as_mut_ptr(), b.as_mut_ptr()) };
            return;
        }
        for (x, y) in a.iter_mut().zip(b.iter_mut()) {
            let lo = (*x).min(*y);
            let hi = (*x).max(*y);
            *x = lo;
            *y = hi;
        }
    }

    /// Reflected compare-exchange: lane `l` of `a` against lane `w-1-l` of
    /// `b`, minima staying in `a`. This is the first layer of a bitonic
    /// merge, where the second run is consumed in reverse.
    #[inline]
    pub fn reflect_minmax(self, a: &mut [i32], b: &mut [i32]) {
        debug_assert_eq!(a.len(), b.len());
        #[cfg(any(target_arch = "x86_64", target_arch = "aarch64"))]
        if self.native {
            // SAFETY: native is only set for w == 4 on a host with the ISA.
            unsafe { native::reflect_minmax4(a.as_mut_ptr(), b.as_mut_ptr()) };
            return;
        }
        let w = a.len();
        for l in 0..w {
            let x = a[l];
            let y = b[w - 1 - l];
            a[l] = x.min(y);
            b[w - 1 - l] = x.max(y);
        }
    }

    /// In-row compare-exchange at distance `j` (a power of two below the row
    /// width): lanes `l` and `l+j` for every `l` with `l & j == 0`.
    #[inline]
    pub fn intra(self, row: &mut [i32], j: usize) {
        debug_assert!(j.is_power_of_two() && j < row.len());
        #[cfg(any(target_arch = "x86_64", target_arch = "aarch64"))]
        if self.native {
            // SAFETY: native is only set for w == 4, so j is 1 or 2.
            unsafe { native::intra4(row.as_mut_ptr(), j) };
            return;
        }
        for l in 0..row.len() {
            if l & j == 0 {
                let x = row[l];
                let y = row[l + j];
                row[l] = x.min(y);
                row[l + j] = x.max(y);
            }
        }
    }
}

#[cfg(target_arch = "x86_64")]
mod native {
    use std::arch::x86_64::*;

    #[target_feature(enable = "sse4.1")]
    pub unsafe fn minmax4(a: *mut i32, b: *mut i32) {
        let va = _mm_loadu_si128(a as *const __m128i);
        let vb = _mm_loadu_si128(b as *const __m128i);
        _mm_storeu_si128(a as *mut __m128i, _mm_min_epi32(va, vb));
        _mm_storeu_si128(b as *mut __m128i, _mm_max_epi32(va, vb));
    }

    #[target_feature(enable = "sse4.1")]
    pub unsafe fn reflect_minmax4(a: *mut i32, b: *mut i32) {
        let va = _mm_loadu_si128(a as *const __m128i);
        let vb = _mm_loadu_si128(b as *const __m128i);
        let rev = _mm_shuffle_epi32(vb, 0x1B); // lanes 3,2,1,0
        let lo = _mm_min_epi32(va, rev);
        let hi = _mm_max_epi32(va, rev);
        _mm_storeu_si128(a as *mut __m128i, lo);
        _mm_storeu_si128(b as *mut __m128i, _mm_shuffle_epi32(hi, 0x1B));
    }

    #[target_feature(enable = "sse4.1")]
    pub unsafe fn intra4(row: *mut i32, j: usize) {
        let v = _mm_loadu_si128(row as *const __m128i);
        let out = match j {
            2 => {
                let sh = _mm_shuffle_epi32(v, 0x4E); // lanes 2,3,0,1
                let lo = _mm_min_epi32(v, sh);
                let hi = _mm_max_epi32(v, sh);
                _mm_blend_epi16(lo, hi, 0xF0)
            }
            _ => {
                debug_assert_eq!(j, 1);
                let sh = _mm_shuffle_epi32(v, 0xB1); // lanes 1,0,3,2
                let lo = _mm_min_epi32(v, sh);
                let hi = _mm_max_epi32(v, sh);
                _mm_blend_epi16(lo, hi, 0xCC)
            }
        };
        _mm_storeu_si128(row as *mut __m128i, out);
    }
}

#[cfg(target_arch = "aarch64")]
mod native {
    use std::arch::aarch64::*;

    #[inline]
    unsafe fn reverse4(v: int32x4_t) -> int32x4_t {
        let half = vrev64q_s32(v); // lanes 1,0,3,2
        vextq_s32(half, half, 2) // lanes 3,2,1,0
    }

    pub unsafe fn minmax4(a: *mut i32, b: *mut i32) {
        let va = vld1q_s32(a);
        let vb = vld1q_s32(b);
        vst1q_s32(a, vminq_s32(va, vb));
        vst1q_s32(b, vmaxq_s32(va, vb));
    }

    pub unsafe fn reflect_minmax4(a: *mut i32, b: *mut i32) {
        let va = vld1q_s32(a);
        let vb = vld1q_s32(b);
        let rev = reverse4(vb);
        let lo = vminq_s32(va, rev);
        let hi = vmaxq_s32(va, rev);
        vst1q_s32(a, lo);
        vst1q_s32(b, reverse4(hi));
    }

    pub unsafe fn intra4(row: *mut i32, j: usize) {
        let v = vld1q_s32(row);
        let out = match j {
            2 => {
                let sh = vextq_s32(v, v, 2); // lanes 2,3,0,1
                let lo = vminq_s32(v, sh);
                let hi = vmaxq_s32(v, sh);
                vcombine_s32(vget_low_s32(lo), vget_high_s32(hi))
            }
            _ => {
                debug_assert_eq!(j, 1);
                let sh = vrev64q_s32(v); // lanes 1,0,3,2
                let lo = vminq_s32(v, sh);
                let hi = vmaxq_s32(v, sh);
                vtrn1q_s32(lo, hi)
            }
        };
        vst1q_s32(row, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn both_backends() -> Vec<Lanes> {
        let mut v = vec![Lanes::new(LaneBackend::Emulated, 4)];
        if LaneBackend::native_supported() {
            v.push(Lanes::new(LaneBackend::Native, 4));
        }
        v
    }

    #[test]
    fn minmax_splits_lanes() {
        for lanes in both_backends() {
            let mut a = [5, -1, 7, 0];
            let mut b = [3, -2, 9, 0];
            lanes.minmax(&mut a, &mut b);
            assert_eq!(a, [3, -2, 7, 0]);
            assert_eq!(b, [5, -1, 9, 0]);
        }
    }

    #[test]
    fn reflect_pairs_opposite_lanes() {
        for lanes in both_backends() {
            let mut a = [1, 4, 6, 8];
            let mut b = [2, 3, 5, 7];
            // pairs: (1,7) (4,5) (6,3) (8,2)
            lanes.reflect_minmax(&mut a, &mut b);
            assert_eq!(a, [1, 4, 3, 2]);
            assert_eq!(b, [8, 6, 5, 7]);
        }
    }

    #[test]
    fn intra_distance_one_and_two() {
        for lanes in both_backends() {
            let mut row = [4, 1, 3, 2];
            lanes.intra(&mut row, 1);
            assert_eq!(row, [1, 4, 2, 3]);
            let mut row = [4, 1, 3, 2];
            lanes.intra(&mut row, 2);
            assert_eq!(row, [3, 1, 4, 2]);
        }
    }

    #[test]
    fn native_matches_emulated_on_random_rows() {
        if !LaneBackend::native_supported() {
            return;
        }
        let emu = Lanes::new(LaneBackend::Emulated, 4);
        let nat = Lanes::new(LaneBackend::Native, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let a: [i32; 4] = rng.random();
            let b: [i32; 4] = rng.random();

            let (mut a1, mut b1) = (a, b);
            let (mut a2, mut b2) = (a, b);
            emu.minmax(&mut a1, &mut b1);
            nat.minmax(&mut a2, &mut b2);
            assert_eq!((a1, b1), (a2, b2));

            let (mut a1, mut b1) = (a, b);
            let (mut a2, mut b2) = (a, b);
            emu.reflect_minmax(&mut a1, &mut b1);
            nat.reflect_minmax(&mut a2, &mut b2);
            assert_eq!((a1, b1), (a2, b2));

            for j in [1, 2] {
                let mut r1 = a;
                let mut r2 = a;
                emu.intra(&mut r1, j);
                nat.intra(&mut r2, j);
                assert_eq!(r1, r2);
            }
        }
    }

    #[test]
    fn emulated_handles_wide_rows() {
        let lanes = Lanes::new(LaneBackend::Emulated, 8);
        let mut row = [8, 7, 6, 5, 4, 3, 2, 1];
        lanes.intra(&mut row, 4);
        assert_eq!(row, [4, 3, 2, 1, 8, 7, 6, 5]);
    }
}
