//! Property tests for the structural invariants: permutation preservation,
//! ascending outputs, kernel agreement, and co-rank splits.

use proptest::collection::vec;
use proptest::prelude::*;
use vmsort::{
    bitonic_merge_network, bitonic_sorter, corank_partition, is_ascending, merge_runs,
    odd_even_sorter, sort_parallel, sort_single, Block, LaneBackend, MergeKernel, SortConfig,
};

fn sorted_multiset(xs: &[i32]) -> Vec<i32> {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v
}

fn sorted_run() -> impl Strategy<Value = Vec<i32>> {
    vec(any::<i32>(), 0..200).prop_map(|mut v| {
        v.sort_unstable();
        v
    })
}

proptest! {
    #[test]
    fn apply_network_is_a_permutation(data in vec(any::<i32>(), 16..=16)) {
        for net in [bitonic_sorter(16).unwrap(), odd_even_sorter(16).unwrap()] {
            let mut out = data.clone();
            net.apply(&mut out).unwrap();
            prop_assert!(is_ascending(&out));
            prop_assert_eq!(sorted_multiset(&out), sorted_multiset(&data));
        }
    }

    #[test]
    fn merge_network_sorts_two_run_inputs(
        mut a in vec(any::<i32>(), 8..=8),
        mut b in vec(any::<i32>(), 8..=8),
    ) {
        a.sort_unstable();
        b.sort_unstable();
        let net = bitonic_merge_network(16).unwrap();
        let mut data = [a.as_slice(), b.as_slice()].concat();
        net.apply(&mut data).unwrap();
        prop_assert!(is_ascending(&data));
    }

    #[test]
    fn merge_runs_is_an_ascending_permutation(a in sorted_run(), b in sorted_run()) {
        for kind in [MergeKernel::Serial, MergeKernel::Vectorized, MergeKernel::Hybrid] {
            let mut out = vec![0; a.len() + b.len()];
            merge_runs(&a, &b, kind, LaneBackend::Emulated, 4, &mut out).unwrap();
            prop_assert!(is_ascending(&out));
            prop_assert_eq!(
                sorted_multiset(&out),
                sorted_multiset(&[a.as_slice(), b.as_slice()].concat())
            );

            let mut flipped = vec![0; out.len()];
            merge_runs(&b, &a, kind, LaneBackend::Emulated, 4, &mut flipped).unwrap();
            prop_assert_eq!(flipped, out);
        }
    }

    #[test]
    fn block_ops_preserve_the_multiset(data in vec(any::<i32>(), 64..=64)) {
        let mut block = Block::from_slice(16, 4, &data).unwrap();
        block.column_sort(&vmsort::best16_sorter(), LaneBackend::Emulated).unwrap();
        let transposed = block.transpose_rw().unwrap();
        prop_assert_eq!(sorted_multiset(transposed.as_flat()), sorted_multiset(&data));
    }

    #[test]
    fn sort_single_sorts_anything(data in vec(any::<i32>(), 0..3000)) {
        let mut out = data.clone();
        sort_single(&mut out, &SortConfig::default());
        prop_assert!(is_ascending(&out));
        prop_assert_eq!(sorted_multiset(&out), sorted_multiset(&data));
    }

    #[test]
    fn sort_parallel_equals_sort_single(data in vec(any::<i32>(), 0..3000), t in 1usize..9) {
        let cfg = SortConfig::default();
        let mut single = data.clone();
        let mut parallel = data;
        sort_single(&mut single, &cfg);
        sort_parallel(&mut parallel, &cfg, t);
        prop_assert_eq!(parallel, single);
    }

    #[test]
    fn corank_splits_are_consistent(a in sorted_run(), b in sorted_run(), k_frac in 0.0f64..=1.0) {
        let total = a.len() + b.len();
        let k = ((total as f64) * k_frac) as usize;
        let (i, j) = corank_partition(&a, &b, k).unwrap();
        prop_assert_eq!(i + j, k);
        // a[..i] and b[..j] hold the k smallest under ties-favor-a.
        if i > 0 && j < b.len() {
            prop_assert!(a[i - 1] <= b[j]);
        }
        if j > 0 && i < a.len() {
            prop_assert!(b[j - 1] < a[i]);
        }
    }
}
