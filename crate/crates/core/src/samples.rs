//! Small named posets and maps that come up again and again.

use std::sync::Arc;

use crate::poset::{validate_poset, FinPoset, MonotoneMap};

const LETTERS: &str = "abcdefghijklmnopqrstuvwxyz";

/// The one-element poset `{pt}`.
pub fn point() -> FinPoset {
    FinPoset::discrete(["pt"]).unwrap()
}

/// Chain `0 < 1 < ... < n-1`.
pub fn chain(n: usize) -> FinPoset {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    FinPoset::new(names, &pairs).unwrap()
}

/// Antichain on `a, b, c, ...`.
pub fn antichain(n: usize) -> FinPoset {
    FinPoset::discrete(letters(n)).unwrap()
}

pub(crate) fn letters(n: usize) -> Vec<String> {
    assert!(n <= LETTERS.len());
    LETTERS[..n].chars().map(String::from).collect()
}

/// `a, b < t`.
pub fn vee() -> FinPoset {
    validate_poset(&["a", "b", "t"], &[("a", "t"), ("b", "t")]).unwrap()
}

/// `t < a, b`.
pub fn lambda() -> FinPoset {
    vee().dual()
}

/// `bot < a, b < top`.
pub fn diamond() -> FinPoset {
    validate_poset(
        &["bot", "a", "b", "top"],
        &[("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
    )
    .unwrap()
}

/// The embedding `{a, b} ↪ V`: join-semilattices are exactly the posets that
/// are left Kan-injective for it.
pub fn antichain_into_vee() -> MonotoneMap {
    MonotoneMap::new(Arc::new(antichain(2)), Arc::new(vee()), vec![0, 1]).unwrap()
}

/// `{a, b} -> 1`.
pub fn antichain_to_point() -> MonotoneMap {
    MonotoneMap::constant(Arc::new(antichain(2)), Arc::new(point()), 0)
}

/// `0 < 1` collapsed onto the point.
pub fn chain_to_point() -> MonotoneMap {
    MonotoneMap::constant(Arc::new(chain(2)), Arc::new(point()), 0)
}

/// `∅ ↪ 1`.
pub fn empty_into_point() -> MonotoneMap {
    MonotoneMap::from_empty(Arc::new(point()))
}
