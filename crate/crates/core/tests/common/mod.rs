#![allow(dead_code)]

use std::sync::Arc;

use kanpos::poset::enumerate_monotone_maps;
use kanpos::{FinPoset, MonotoneMap};
use proptest::prelude::*;

/// A random poset on `0..n`: each pair `i < j` of a shuffled order is related
/// with probability one half before closing transitively.
pub fn poset(max: usize) -> impl Strategy<Value = Arc<FinPoset>> {
    (0..=max)
        .prop_flat_map(|n| {
            let pairs = n * n.saturating_sub(1) / 2;
            (
                Just(n),
                proptest::collection::vec(any::<bool>(), pairs),
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            )
        })
        .prop_map(|(n, bits, perm)| {
            let mut rel = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        rel.push((perm[i], perm[j]));
                    }
                    k += 1;
                }
            }
            let names = (0..n).map(|i| format!("e{i}")).collect();
            Arc::new(FinPoset::new(names, &rel).unwrap())
        })
}

/// The `k`-th monotone map `a -> b` (modulo the number of maps), if any.
pub fn nth_map(a: &Arc<FinPoset>, b: &Arc<FinPoset>, k: usize) -> Option<MonotoneMap> {
    let all: Vec<MonotoneMap> = enumerate_monotone_maps(a, b).collect();
    if all.is_empty() {
        None
    } else {
        Some(all[k % all.len()].clone())
    }
}

/// A random poset pair with a monotone map between them.
pub fn map(max_dom: usize, max_cod: usize) -> impl Strategy<Value = MonotoneMap> {
    (poset(max_dom), poset(max_cod), any::<usize>())
        .prop_filter_map("no map", |(a, b, k)| nth_map(&a, &b, k))
}

/// Two parallel maps.
pub fn parallel(
    max_dom: usize,
    max_cod: usize,
) -> impl Strategy<Value = (MonotoneMap, MonotoneMap)> {
    (
        poset(max_dom),
        poset(max_cod),
        any::<usize>(),
        any::<usize>(),
    )
        .prop_filter_map("no map", |(a, b, i, j)| {
            Some((nth_map(&a, &b, i)?, nth_map(&a, &b, j)?))
        })
}

/// Maps sharing a domain.
pub fn span(max_dom: usize, max_cod: usize) -> impl Strategy<Value = (MonotoneMap, MonotoneMap)> {
    (
        poset(max_dom),
        poset(max_cod),
        poset(max_cod),
        any::<usize>(),
        any::<usize>(),
    )
        .prop_filter_map("no map", |(a, b, c, i, j)| {
            Some((nth_map(&a, &b, i)?, nth_map(&a, &c, j)?))
        })
}

pub fn all_maps(a: &Arc<FinPoset>, b: &Arc<FinPoset>) -> Vec<MonotoneMap> {
    enumerate_monotone_maps(a, b).collect()
}

/// Order-preserving bijection with monotone inverse, by brute force.
pub fn isomorphic(a: &Arc<FinPoset>, b: &Arc<FinPoset>) -> bool {
    a.len() == b.len() && all_maps(a, b).iter().any(|f| f.is_iso())
}
