use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::{FinPoset, MonotoneMap};

/// Backtracking search over monotone maps `dom -> cod`, optionally with a set
/// of allowed images per domain element.
///
/// Domain elements are assigned along the canonical linear extension of
/// `dom`, and candidate images are tried along the canonical linear extension
/// of `cod`, so the emitted order is lexicographic and reproducible.
pub struct MapSearch {
    dom: Arc<FinPoset>,
    cod: Arc<FinPoset>,
    allowed: Option<Vec<FixedBitSet>>,
    order: Vec<usize>,
    current: Vec<usize>,
    frames: Vec<Frame>,
    started: bool,
    exhausted: bool,
}

struct Frame {
    candidates: Vec<usize>,
    pos: usize,
}

impl MapSearch {
    pub fn new(dom: Arc<FinPoset>, cod: Arc<FinPoset>) -> Self {
        let order = dom.linear_extension().to_vec();
        let n = dom.len();
        Self {
            dom,
            cod,
            allowed: None,
            order,
            current: vec![0; n],
            frames: Vec::with_capacity(n),
            started: false,
            exhausted: false,
        }
    }

    /// Restricts the image of each domain element to `allowed[x]`.
    pub fn with_allowed(mut self, allowed: Vec<FixedBitSet>) -> Self {
        assert_eq!(allowed.len(), self.dom.len());
        self.allowed = Some(allowed);
        self
    }

    fn candidates_at(&self, depth: usize) -> Vec<usize> {
        let x = self.order[depth];
        let mut mask = match &self.allowed {
            Some(a) => a[x].clone(),
            None => self.cod.all(),
        };
        for &lo in &self.dom.lower_covers()[x] {
            mask.intersect_with(self.cod.up(self.current[lo]));
        }
        self.cod
            .linear_extension()
            .iter()
            .copied()
            .filter(|&y| mask.contains(y))
            .collect()
    }

    /// Moves the deepest frame to its next candidate, popping exhausted
    /// frames. Returns false when the whole search is exhausted.
    fn bump(&mut self) -> bool {
        while let Some(depth) = self.frames.len().checked_sub(1) {
            let frame = &mut self.frames[depth];
            frame.pos += 1;
            if frame.pos < frame.candidates.len() {
                self.current[self.order[depth]] = frame.candidates[frame.pos];
                return true;
            }
            self.frames.pop();
        }
        false
    }

    /// Extends the current partial assignment to a complete one.
    fn descend(&mut self) -> bool {
        let n = self.order.len();
        while self.frames.len() < n {
            let depth = self.frames.len();
            let candidates = self.candidates_at(depth);
            if candidates.is_empty() {
                if !self.bump() {
                    return false;
                }
                continue;
            }
            self.current[self.order[depth]] = candidates[0];
            self.frames.push(Frame { candidates, pos: 0 });
        }
        true
    }

    /// Next assignment as a slice of images indexed by domain element.
    pub fn next_assignment(&mut self) -> Option<&[usize]> {
        if self.exhausted {
            return None;
        }
        let advanced = if self.started {
            self.bump() && self.descend()
        } else {
            self.started = true;
            self.descend()
        };
        if advanced {
            Some(&self.current)
        } else {
            self.exhausted = true;
            None
        }
    }
}

/// Iterator over all monotone maps between two posets.
pub struct MonotoneMaps {
    search: MapSearch,
}

impl MonotoneMaps {
    pub fn new(search: MapSearch) -> Self {
        Self { search }
    }
}

impl Iterator for MonotoneMaps {
    type Item = MonotoneMap;

    fn next(&mut self) -> Option<MonotoneMap> {
        let dom = self.search.dom.clone();
        let cod = self.search.cod.clone();
        self.search
            .next_assignment()
            .map(|images| MonotoneMap::new_unchecked(dom, cod, images.to_vec()))
    }
}

/// Every monotone map `dom -> cod`, each exactly once, in canonical order.
pub fn enumerate_monotone_maps(dom: &Arc<FinPoset>, cod: &Arc<FinPoset>) -> MonotoneMaps {
    MonotoneMaps::new(MapSearch::new(dom.clone(), cod.clone()))
}

/// For each `x` in `dom`, the images `g(x)` over all monotone `g` with
/// `g(y) ∈ allowed[y]` for every `y`.
///
/// Each candidate value is settled by one search that stops at the first
/// witness, and every witness marks all of its values at once.
pub fn attainable_images(
    dom: &Arc<FinPoset>,
    cod: &Arc<FinPoset>,
    allowed: &[FixedBitSet],
) -> Vec<FixedBitSet> {
    let mut seen = vec![FixedBitSet::with_capacity(cod.len()); dom.len()];
    let Some(pruned) = prune(dom, cod, allowed.to_vec()) else {
        return seen;
    };
    for x in dom.elements() {
        for v in pruned[x].ones() {
            if seen[x].contains(v) {
                continue;
            }
            let mut pinned = pruned.clone();
            pinned[x].clear();
            pinned[x].insert(v);
            if let Some(g) = prune(dom, cod, pinned).and_then(|p| solve(dom, cod, p)) {
                for (y, &gy) in g.iter().enumerate() {
                    seen[y].insert(gy);
                }
            }
        }
    }
    seen
}

/// One monotone map within `allowed` (already pruned), branching on the
/// element with the fewest remaining values and pruning after every choice.
fn solve(dom: &FinPoset, cod: &FinPoset, allowed: Vec<FixedBitSet>) -> Option<Vec<usize>> {
    let open = dom
        .elements()
        .filter(|&x| allowed[x].count_ones(..) > 1)
        .min_by_key(|&x| allowed[x].count_ones(..));
    let Some(x) = open else {
        return Some(
            allowed
                .iter()
                .map(|a| a.ones().next().expect("nonempty"))
                .collect(),
        );
    };
    for v in allowed[x].ones() {
        let mut pinned = allowed.clone();
        pinned[x].clear();
        pinned[x].insert(v);
        if let Some(g) = prune(dom, cod, pinned).and_then(|p| solve(dom, cod, p)) {
            return Some(g);
        }
    }
    None
}

/// Removes values without a partner across some cover of `dom`, until
/// nothing changes. `None` once an element runs out of values.
fn prune(
    dom: &FinPoset,
    cod: &FinPoset,
    mut allowed: Vec<FixedBitSet>,
) -> Option<Vec<FixedBitSet>> {
    let spread = |set: &FixedBitSet, upward: bool| {
        let mut out = FixedBitSet::with_capacity(cod.len());
        for w in set.ones() {
            out.union_with(if upward { cod.up(w) } else { cod.down(w) });
        }
        out
    };
    let pairs = dom.cover_pairs();
    let mut changed = true;
    while changed {
        changed = false;
        for &(lo, hi) in &pairs {
            let lo_ok = spread(&allowed[hi], false);
            let hi_ok = spread(&allowed[lo], true);
            if !allowed[lo].is_subset(&lo_ok) || !allowed[hi].is_subset(&hi_ok) {
                allowed[lo].intersect_with(&lo_ok);
                allowed[hi].intersect_with(&hi_ok);
                changed = true;
            }
        }
    }
    if allowed.iter().any(|a| a.is_clear()) {
        None
    } else {
        Some(allowed)
    }
}

/// All downsets of `p`, sorted by size and then by members (the empty set
/// first).
pub fn downsets(p: &FinPoset) -> Vec<FixedBitSet> {
    // Walk the linear extension from the top; an element is forced in once
    // anything above it is in.
    let order: Vec<usize> = p.linear_extension().iter().rev().copied().collect();
    let mut out = Vec::new();
    let mut set = FixedBitSet::with_capacity(p.len());
    fn go(
        p: &FinPoset,
        order: &[usize],
        depth: usize,
        set: &mut FixedBitSet,
        out: &mut Vec<FixedBitSet>,
    ) {
        if depth == order.len() {
            out.push(set.clone());
            return;
        }
        let x = order[depth];
        let forced = p.up(x).ones().any(|y| y != x && set.contains(y));
        if !forced {
            go(p, order, depth + 1, set, out);
        }
        set.insert(x);
        go(p, order, depth + 1, set, out);
        set.set(x, false);
    }
    go(p, &order, 0, &mut set, &mut out);
    out.sort_by_key(|s| (s.count_ones(..), s.ones().collect::<Vec<_>>()));
    out
}

/// All upsets of `p`.
pub fn upsets(p: &FinPoset) -> Vec<FixedBitSet> {
    downsets(&p.dual())
}
