//! Finite posets and monotone maps: the objects and morphisms of Pos.
//!
//! A [`FinPoset`] stores its order relation transitively closed, one bitset row
//! per element, so `leq` is a single bit test. Everything else in the crate is
//! built on top of the handful of operations here: enumeration of monotone
//! maps, the pointwise hom-order, dualization, and quotients of preorders.

mod enumerate;
mod hom;
mod map;
mod quotient;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

pub use enumerate::{
    attainable_images, downsets, enumerate_monotone_maps, upsets, MapSearch, MonotoneMaps,
};
pub use hom::{hom_poset, Cotensor};
pub use map::{classify_morphism, compare_maps, dualize_map, MapOrder, MonotoneMap, MorphismFlags};
pub(crate) use quotient::quotient_preferring;
pub use quotient::{quotient_by_named_relations, quotient_by_relations, QuotientResult};

/// A finite partially ordered set with named elements.
#[derive(Clone)]
pub struct FinPoset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    /// `up[x]` holds every `y` with `x <= y`.
    up: Vec<FixedBitSet>,
    /// `down[y]` holds every `x` with `x <= y`.
    down: Vec<FixedBitSet>,
    lin_ext: OnceLock<Vec<usize>>,
    lower_covers: OnceLock<Vec<Vec<usize>>>,
}

impl FinPoset {
    /// The empty poset.
    pub fn empty() -> Self {
        Self::from_closed(Vec::new(), Vec::new()).expect("empty poset")
    }

    /// Builds a poset from element names and generating pairs `(lo, hi)`,
    /// closing the relation reflexively and transitively.
    pub fn new(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut up = identity_rows(n);
        for &(lo, hi) in pairs {
            if lo >= n {
                return Err(Error::ImageOutOfRange(lo));
            }
            if hi >= n {
                return Err(Error::ImageOutOfRange(hi));
            }
            up[lo].insert(hi);
        }
        transitive_closure(&mut up);
        Self::from_closed(names, up)
    }

    /// Builds a poset from a relation that is already reflexive and
    /// transitively closed. Fails on duplicate names or order cycles.
    pub(crate) fn from_closed(names: Vec<String>, up: Vec<FixedBitSet>) -> Result<Self> {
        let n = names.len();
        debug_assert_eq!(up.len(), n);
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateElement(name.clone()));
            }
        }
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for (x, row) in up.iter().enumerate() {
            for y in row.ones() {
                if x != y && up[y].contains(x) {
                    return Err(Error::CycleDetected(names[x].clone(), names[y].clone()));
                }
                down[y].insert(x);
            }
        }
        Ok(Self {
            names,
            index,
            up,
            down,
            lin_ext: OnceLock::new(),
            lower_covers: OnceLock::new(),
        })
    }

    /// Discrete poset on the given names.
    pub fn discrete<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let n = names.len();
        Self::from_closed(names, identity_rows(n))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub(crate) fn lookup(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// Principal upset `{ y | x <= y }`.
    pub fn up(&self, x: usize) -> &FixedBitSet {
        &self.up[x]
    }

    /// Principal downset `{ y | y <= x }`.
    pub fn down(&self, x: usize) -> &FixedBitSet {
        &self.down[x]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    /// Full carrier as a bitset.
    pub fn all(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    /// Canonical linear extension: a stable topological sort that always
    /// emits the minimal remaining element with the least identifier.
    pub fn linear_extension(&self) -> &[usize] {
        self.lin_ext.get_or_init(|| {
            let n = self.len();
            let mut pending: Vec<usize> = (0..n).map(|x| self.down[x].count_ones(..) - 1).collect();
            let mut ready: BTreeSet<(&str, usize)> = (0..n)
                .filter(|&x| pending[x] == 0)
                .map(|x| (self.names[x].as_str(), x))
                .collect();
            let mut out = Vec::with_capacity(n);
            while let Some((_, x)) = ready.pop_first() {
                out.push(x);
                for y in self.up[x].ones() {
                    if y != x {
                        pending[y] -= 1;
                        if pending[y] == 0 {
                            ready.insert((self.names[y].as_str(), y));
                        }
                    }
                }
            }
            out
        })
    }

    /// Immediate predecessors of each element (the Hasse diagram).
    pub fn lower_covers(&self) -> &[Vec<usize>] {
        self.lower_covers.get_or_init(|| {
            (0..self.len())
                .map(|y| {
                    self.down[y]
                        .ones()
                        .filter(|&x| x != y)
                        .filter(|&x| {
                            !self.down[y]
                                .ones()
                                .any(|z| z != x && z != y && self.leq(x, z))
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// Cover pairs `(lo, hi)` ordered by `(lo, hi)` index.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let covers = self.lower_covers();
        let mut pairs: Vec<(usize, usize)> = covers
            .iter()
            .enumerate()
            .flat_map(|(hi, los)| los.iter().map(move |&lo| (lo, hi)))
            .collect();
        pairs.sort_unstable();
        pairs
    }

    pub fn is_discrete(&self) -> bool {
        self.up.iter().all(|row| row.count_ones(..) == 1)
    }

    pub fn is_downset(&self, set: &FixedBitSet) -> bool {
        set.ones().all(|x| self.down[x].is_subset(set))
    }

    /// Down-closure of a set of elements.
    pub fn down_closure(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.len());
        for x in set.ones() {
            out.union_with(&self.down[x]);
        }
        out
    }

    /// All upper bounds of `set`; the whole carrier when `set` is empty.
    pub fn upper_bounds(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut bounds = self.all();
        for x in set.ones() {
            bounds.intersect_with(&self.up[x]);
        }
        bounds
    }

    /// Least element of `set`, if it has one.
    pub fn least_of(&self, set: &FixedBitSet) -> Option<usize> {
        set.ones().find(|&x| set.is_subset(&self.up[x]))
    }

    /// Join (least upper bound) of `set`; the bottom when `set` is empty.
    pub fn join(&self, set: &FixedBitSet) -> Option<usize> {
        self.least_of(&self.upper_bounds(set))
    }

    pub fn join2(&self, x: usize, y: usize) -> Option<usize> {
        let mut s = FixedBitSet::with_capacity(self.len());
        s.insert(x);
        s.insert(y);
        self.join(&s)
    }

    pub fn bottom(&self) -> Option<usize> {
        self.least_of(&self.all())
    }

    pub fn top(&self) -> Option<usize> {
        (0..self.len()).find(|&x| self.down[x].count_ones(..) == self.len())
    }

    /// Every pair of elements has a join (vacuously true when empty).
    pub fn is_join_semilattice(&self) -> bool {
        (0..self.len()).all(|x| (x..self.len()).all(|y| self.join2(x, y).is_some()))
    }

    /// Every subset has a join; for finite posets, a complete lattice.
    pub fn is_complete_lattice(&self) -> bool {
        !self.is_empty() && self.bottom().is_some() && self.is_join_semilattice()
    }

    /// The order-dual poset: same names, reversed order.
    pub fn dual(&self) -> Self {
        Self {
            names: self.names.clone(),
            index: self.index.clone(),
            up: self.down.clone(),
            down: self.up.clone(),
            lin_ext: OnceLock::new(),
            lower_covers: OnceLock::new(),
        }
    }

    /// Induced subposet on `keep`, in index order. Returns the subposet and
    /// the index of each kept element in `self`.
    pub fn induced(&self, keep: &FixedBitSet) -> (Self, Vec<usize>) {
        let members: Vec<usize> = keep.ones().collect();
        let names = members.iter().map(|&x| self.names[x].clone()).collect();
        let up = members
            .iter()
            .map(|&x| {
                let mut row = FixedBitSet::with_capacity(members.len());
                for (j, &y) in members.iter().enumerate() {
                    if self.leq(x, y) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        let sub = Self::from_closed(names, up).expect("subposet of a poset");
        (sub, members)
    }

    /// Same order, elements renamed. Names must stay unique.
    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        Self::from_closed(names, self.up.clone())
    }
}

/// Builds a poset from element names and `(lo, hi)` pairs given by name.
///
/// The pairs need not be covers; the relation is closed reflexively and
/// transitively, and a closure that identifies two distinct elements is
/// rejected.
pub fn validate_poset<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<FinPoset> {
    let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
    let mut index = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.as_str(), i).is_some() {
            return Err(Error::DuplicateElement(n.clone()));
        }
    }
    let resolve = |s: &S| {
        index
            .get(s.as_ref())
            .copied()
            .ok_or_else(|| Error::UnknownElement(s.as_ref().to_string()))
    };
    let idx_pairs = pairs
        .iter()
        .map(|(lo, hi)| Ok((resolve(lo)?, resolve(hi)?)))
        .collect::<Result<Vec<_>>>()?;
    FinPoset::new(names, &idx_pairs)
}

/// Order-dual of a poset.
pub fn dualize(p: &FinPoset) -> FinPoset {
    p.dual()
}

impl PartialEq for FinPoset {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.up == other.up
    }
}

impl Eq for FinPoset {}

impl fmt::Debug for FinPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{ elements: {} ; order:", self.names.join(" "))?;
        for (lo, hi) in self.cover_pairs() {
            write!(f, " {}<{}", self.names[lo], self.names[hi])?;
        }
        write!(f, " }}")
    }
}

pub(crate) fn identity_rows(n: usize) -> Vec<FixedBitSet> {
    (0..n)
        .map(|i| {
            let mut row = FixedBitSet::with_capacity(n);
            row.insert(i);
            row
        })
        .collect()
}

/// Warshall's algorithm over bitset rows.
pub(crate) fn transitive_closure(up: &mut [FixedBitSet]) {
    let n = up.len();
    for k in 0..n {
        let row_k = up[k].clone();
        for row in up.iter_mut() {
            if row.contains(k) {
                row.union_with(&row_k);
            }
        }
    }
}

/// Structural equality of shared posets with a pointer fast path.
#[inline]
pub(crate) fn same_poset(a: &Arc<FinPoset>, b: &Arc<FinPoset>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Names for a batch of new elements: `candidates` when they are unique,
/// otherwise each one suffixed with its position.
pub(crate) fn unique_names(candidates: Vec<String>) -> Vec<String> {
    let distinct: std::collections::HashSet<&String> = candidates.iter().collect();
    if distinct.len() == candidates.len() {
        candidates
    } else {
        candidates
            .into_iter()
            .enumerate()
            .map(|(i, c)| format!("{c}_{i}"))
            .collect()
    }
}

/// A fresh name `prefix + base` not present in `taken`, padding with `_`.
pub(crate) fn fresh_name(
    prefix: &str,
    base: &str,
    taken: &std::collections::HashSet<String>,
) -> String {
    let mut name = format!("{prefix}{base}");
    while taken.contains(&name) {
        name.insert(prefix.len(), '_');
    }
    name
}
