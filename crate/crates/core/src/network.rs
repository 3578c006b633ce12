//! Comparator networks: bitonic and Batcher odd-even sorters, the 16-input
//! best network, and bitonic merging networks, plus a scalar reference
//! executor and zero-one verification.

use std::fmt;

use crate::error::Error;

/// A single compare-exchange: min lands on channel `lo`, max on channel `hi`.
///
/// Networks are normalized to ascending order (`lo < hi`); a descending sort
/// is obtained by reversing the output, not by flipping comparators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Comparator {
    pub lo: usize,
    pub hi: usize,
}

impl Comparator {
    pub fn new(lo: usize, hi: usize) -> Self {
        debug_assert!(lo < hi);
        Comparator { lo, hi }
    }
}

/// A data-independent comparator network over `n` channels, grouped into
/// layers whose comparators touch disjoint channels and can therefore be
/// executed in parallel (one layer maps to one batch of lane min/max ops).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparatorNetwork {
    n: usize,
    layers: Vec<Vec<Comparator>>,
}

impl ComparatorNetwork {
    /// Builds a network from explicit layers, validating that every
    /// comparator is normalized, in range, and that no channel is used twice
    /// within one layer.
    pub fn from_layers(n: usize, layers: Vec<Vec<Comparator>>) -> Result<Self, Error> {
        for layer in &layers {
            let mut used = 0u64;
            for c in layer {
                if c.lo >= c.hi || c.hi >= n || n > 64 {
                    return Err(Error::InvalidComparator { lo: c.lo, hi: c.hi, n });
                }
                for ch in [c.lo, c.hi] {
                    if used & (1 << ch) != 0 {
                        return Err(Error::ChannelReuseInLayer(ch));
                    }
                    used |= 1 << ch;
                }
            }
        }
        Ok(ComparatorNetwork { n, layers })
    }

    /// Channel count.
    pub fn channels(&self) -> usize {
        self.n
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn comparator_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn layers(&self) -> &[Vec<Comparator>] {
        &self.layers
    }

    /// All comparators in execution order (layer by layer).
    pub fn comparators(&self) -> impl Iterator<Item = Comparator> + '_ {
        self.layers.iter().flatten().copied()
    }

    /// Applies the network to `data` in place: each comparator places the
    /// smaller element on its `lo` channel and the larger on `hi`.
    pub fn apply<T: Ord>(&self, data: &mut [T]) -> Result<(), Error> {
        if data.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, actual: data.len() });
        }
        for c in self.comparators() {
            if data[c.lo] > data[c.hi] {
                data.swap(c.lo, c.hi);
            }
        }
        Ok(())
    }

    /// Exhaustively checks all `2^n` binary inputs. By the zero-one principle
    /// the network sorts every input iff it sorts every binary input.
    ///
    /// Rejects `n > 24` where the enumeration stops being feasible.
    pub fn verify_zero_one(&self) -> Result<bool, Error> {
        if self.n > 24 {
            return Err(Error::TooManyChannelsForZeroOne(self.n));
        }
        // Channel i lives in bit i; a comparator is an AND/OR pair on bits.
        for input in 0u32..1u32 << self.n {
            let mut x = input;
            for c in self.comparators() {
                let lo = (x >> c.lo) & 1;
                let hi = (x >> c.hi) & 1;
                x &= !((1 << c.lo) | (1 << c.hi));
                x |= ((lo & hi) << c.lo) | ((lo | hi) << c.hi);
            }
            // Sorted ascending = all ones packed into the top channels.
            let ones = x.count_ones();
            if x != ((1u32 << ones) - 1) << (self.n as u32 - ones) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for ComparatorNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, layer) in self.layers.iter().enumerate() {
            write!(f, "layer {k}:")?;
            for c in layer {
                write!(f, " ({},{})", c.lo, c.hi)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn check_channel_count(n: usize) -> Result<u32, Error> {
    if n < 2 || n > 64 || !n.is_power_of_two() {
        return Err(Error::InvalidChannelCount(n));
    }
    Ok(n.trailing_zeros())
}

/// Bitonic sorting network for `n = 2^k` channels, `n <= 64`.
///
/// Uses the all-ascending form: each stage opens with a reflected layer
/// inside every block, so no descending comparators are needed. Comparator
/// count is `(n/4)*k*(k+1)`.
pub fn bitonic_sorter(n: usize) -> Result<ComparatorNetwork, Error> {
    let k = check_channel_count(n)?;
    let mut layers = Vec::new();
    let mut block = 2;
    while block <= n {
        let mut layer = Vec::with_capacity(n / 2);
        for base in (0..n).step_by(block) {
            for i in 0..block / 2 {
                layer.push(Comparator::new(base + i, base + block - 1 - i));
            }
        }
        layers.push(layer);
        let mut j = block / 4;
        while j >= 1 {
            let mut layer = Vec::with_capacity(n / 2);
            for i in 0..n {
                if i & j == 0 {
                    layer.push(Comparator::new(i, i + j));
                }
            }
            layers.push(layer);
            j /= 2;
        }
        block *= 2;
    }
    let net = ComparatorNetwork::from_layers(n, layers)?;
    debug_assert_eq!(net.comparator_count(), n * (k as usize) * (k as usize + 1) / 4);
    Ok(net)
}

/// Batcher odd-even merge-exchange sorting network for `n = 2^k` channels.
pub fn odd_even_sorter(n: usize) -> Result<ComparatorNetwork, Error> {
    check_channel_count(n)?;
    let mut layers = Vec::new();
    let mut p = 1;
    while p < n {
        let mut k = p;
        while k >= 1 {
            let mut layer = Vec::new();
            let mut j = k % p;
            while j + k < n {
                for i in 0..k.min(n - j - k) {
                    // Only exchange within one merge block of width 2p.
                    if (i + j) / (2 * p) == (i + j + k) / (2 * p) {
                        layer.push(Comparator::new(i + j, i + j + k));
                    }
                }
                j += 2 * k;
            }
            layers.push(layer);
            k /= 2;
        }
        p *= 2;
    }
    ComparatorNetwork::from_layers(n, layers)
}

/// The published best-known size-optimal 16-input sorting network:
/// 60 comparators in 10 layers. Verified exhaustively by the zero-one
/// principle in the test suite.
pub fn best16_sorter() -> ComparatorNetwork {
    const LAYERS: [&[(usize, usize)]; 10] = [
        &[(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11), (12, 13), (14, 15)],
        &[(0, 2), (4, 6), (8, 10), (12, 14), (1, 3), (5, 7), (9, 11), (13, 15)],
        &[(0, 4), (8, 12), (1, 5), (9, 13), (2, 6), (10, 14), (3, 7), (11, 15)],
        &[(0, 8), (1, 9), (2, 10), (3, 11), (4, 12), (5, 13), (6, 14), (7, 15)],
        &[(5, 10), (6, 9), (3, 12), (13, 14), (7, 11), (1, 2), (4, 8)],
        &[(1, 4), (7, 13), (2, 8), (11, 14), (5, 6), (9, 10)],
        &[(2, 4), (11, 13), (3, 8), (7, 12)],
        &[(6, 8), (10, 12), (3, 5), (7, 9)],
        &[(3, 4), (5, 6), (7, 8), (9, 10), (11, 12)],
        &[(6, 7), (8, 9)],
    ];
    let layers = LAYERS
        .iter()
        .map(|layer| layer.iter().map(|&(lo, hi)| Comparator::new(lo, hi)).collect())
        .collect();
    let net = ComparatorNetwork::from_layers(16, layers).expect("fixed network is well-formed");
    debug_assert_eq!(net.comparator_count(), 60);
    net
}

/// Bitonic merging network for `n = 2^k` channels: sorts any input whose two
/// halves are each ascending. The first layer pairs channel `i` with
/// `n-1-i`, performing the usual second-half reversal implicitly, so callers
/// hand over two ascending runs as-is. `k` layers, `n/2` comparators each.
pub fn bitonic_merge_network(n: usize) -> Result<ComparatorNetwork, Error> {
    let k = check_channel_count(n)?;
    let mut layers = Vec::with_capacity(k as usize);
    let mut layer = Vec::with_capacity(n / 2);
    for i in 0..n / 2 {
        layer.push(Comparator::new(i, n - 1 - i));
    }
    layers.push(layer);
    let mut j = n / 4;
    while j >= 1 {
        let mut layer = Vec::with_capacity(n / 2);
        for i in 0..n {
            if i & j == 0 {
                layer.push(Comparator::new(i, i + j));
            }
        }
        layers.push(layer);
        j /= 2;
    }
    let net = ComparatorNetwork::from_layers(n, layers)?;
    debug_assert_eq!(net.comparator_count(), n / 2 * k as usize);
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bitonic_counts_match_published_table() {
        for (n, count) in [(4, 6), (8, 24), (16, 80), (32, 240)] {
            assert_eq!(bitonic_sorter(n).unwrap().comparator_count(), count, "n={n}");
        }
        assert_eq!(bitonic_sorter(2).unwrap().comparator_count(), 1);
    }

    #[test]
    fn bitonic_count_formula_holds_up_to_64() {
        for k in 1..=6usize {
            let n = 1 << k;
            let net = bitonic_sorter(n).unwrap();
            assert_eq!(net.comparator_count(), n * k * (k + 1) / 4);
        }
    }

    #[test]
    fn odd_even_counts_match_published_table() {
        for (n, count) in [(4, 5), (8, 19), (16, 63), (32, 191)] {
            assert_eq!(odd_even_sorter(n).unwrap().comparator_count(), count, "n={n}");
        }
        assert_eq!(odd_even_sorter(2).unwrap().comparator_count(), 1);
    }

    #[test]
    fn best16_has_sixty_comparators() {
        assert_eq!(best16_sorter().comparator_count(), 60);
        assert_eq!(best16_sorter().channels(), 16);
    }

    #[test]
    fn invalid_channel_counts_rejected() {
        for n in [0, 1, 3, 6, 12, 65, 128] {
            assert!(bitonic_sorter(n).is_err(), "n={n}");
            assert!(odd_even_sorter(n).is_err(), "n={n}");
            assert!(bitonic_merge_network(n).is_err(), "n={n}");
        }
    }

    #[test]
    fn sorters_pass_zero_one_up_to_16() {
        for n in [2, 4, 8, 16] {
            assert!(bitonic_sorter(n).unwrap().verify_zero_one().unwrap(), "bitonic n={n}");
            assert!(odd_even_sorter(n).unwrap().verify_zero_one().unwrap(), "odd-even n={n}");
        }
    }

    #[test]
    fn best16_passes_zero_one() {
        assert!(best16_sorter().verify_zero_one().unwrap());
    }

    #[test]
    fn weakened_best16_fails_zero_one() {
        let full = best16_sorter();
        let mut layers: Vec<Vec<Comparator>> = full.layers().to_vec();
        layers.pop();
        let broken = ComparatorNetwork::from_layers(16, layers).unwrap();
        assert!(!broken.verify_zero_one().unwrap());
    }

    #[test]
    fn zero_one_rejects_wide_networks() {
        let net = bitonic_sorter(32).unwrap();
        assert_eq!(net.verify_zero_one(), Err(Error::TooManyChannelsForZeroOne(32)));
    }

    #[test]
    fn empty_network_on_one_channel_is_sorted() {
        let net = ComparatorNetwork::from_layers(1, Vec::new()).unwrap();
        assert!(net.verify_zero_one().unwrap());
        let mut data = [7];
        net.apply(&mut data).unwrap();
        assert_eq!(data, [7]);
    }

    #[test]
    fn apply_sorts_reverse_input() {
        let mut data = [4, 3, 2, 1];
        bitonic_sorter(4).unwrap().apply(&mut data).unwrap();
        assert_eq!(data, [1, 2, 3, 4]);
    }

    #[test]
    fn apply_rejects_length_mismatch() {
        let net = bitonic_sorter(4).unwrap();
        let mut data = [1, 2, 3];
        assert_eq!(
            net.apply(&mut data),
            Err(Error::LengthMismatch { expected: 4, actual: 3 })
        );
    }

    #[test]
    fn best16_sorts_random_permutations() {
        let net = best16_sorter();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mut data: Vec<i32> = (0..16).collect();
            data.shuffle(&mut rng);
            net.apply(&mut data).unwrap();
            assert_eq!(data, (0..16).collect::<Vec<_>>());
        }
        let mut sorted: Vec<i32> = (0..16).collect();
        net.apply(&mut sorted).unwrap();
        assert_eq!(sorted, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn best16_output_is_independent_of_order_within_layers() {
        let net = best16_sorter();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let mut shuffled_layers: Vec<Vec<Comparator>> = net.layers().to_vec();
            for layer in &mut shuffled_layers {
                layer.shuffle(&mut rng);
            }
            let shuffled = ComparatorNetwork::from_layers(16, shuffled_layers).unwrap();
            let input: Vec<i32> = (0..16).map(|_| rng.random()).collect();
            let mut a = input.clone();
            let mut b = input;
            net.apply(&mut a).unwrap();
            shuffled.apply(&mut b).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn merge_network_counts_and_layers() {
        let net = bitonic_merge_network(32).unwrap();
        assert_eq!(net.comparator_count(), 80);
        assert_eq!(net.layer_count(), 5);
        assert_eq!(bitonic_merge_network(2).unwrap().comparator_count(), 1);
    }

    #[test]
    fn merge_network_merges_two_ascending_runs() {
        let net = bitonic_merge_network(4).unwrap();
        let mut data = [1, 3, 2, 4];
        net.apply(&mut data).unwrap();
        assert_eq!(data, [1, 2, 3, 4]);
    }

    #[test]
    fn merge_network_handles_all_binary_two_run_inputs_up_to_16() {
        for n in [2usize, 4, 8, 16] {
            let net = bitonic_merge_network(n).unwrap();
            let half = n / 2;
            for a_ones in 0..=half {
                for b_ones in 0..=half {
                    let mut data = vec![0u8; n];
                    for x in &mut data[half - a_ones..half] {
                        *x = 1;
                    }
                    for x in &mut data[n - b_ones..] {
                        *x = 1;
                    }
                    let mut expect = data.clone();
                    expect.sort_unstable();
                    net.apply(&mut data).unwrap();
                    assert_eq!(data, expect, "n={n} a_ones={a_ones} b_ones={b_ones}");
                }
            }
        }
    }

    #[test]
    fn layer_channel_reuse_rejected() {
        let layers = vec![vec![Comparator::new(0, 1), Comparator::new(1, 2)]];
        assert_eq!(
            ComparatorNetwork::from_layers(4, layers),
            Err(Error::ChannelReuseInLayer(1))
        );
    }

    #[test]
    fn dump_format_is_stable() {
        let net = bitonic_sorter(4).unwrap();
        assert_eq!(
            net.to_string(),
            "layer 0: (0,1) (2,3)\nlayer 1: (0,3) (1,2)\nlayer 2: (0,1) (2,3)\n"
        );
    }
}
