use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::{same_poset, FinPoset};

/// A monotone map between finite posets.
#[derive(Clone)]
pub struct MonotoneMap {
    dom: Arc<FinPoset>,
    cod: Arc<FinPoset>,
    images: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(dom: Arc<FinPoset>, cod: Arc<FinPoset>, images: Vec<usize>) -> Result<Self> {
        if images.len() != dom.len() {
            return Err(Error::WrongArity {
                expected: dom.len(),
                got: images.len(),
            });
        }
        if let Some(&bad) = images.iter().find(|&&y| y >= cod.len()) {
            return Err(Error::ImageOutOfRange(bad));
        }
        for y in dom.elements() {
            for &x in &dom.lower_covers()[y] {
                if !cod.leq(images[x], images[y]) {
                    return Err(Error::NotMonotone {
                        lo: dom.name(x).to_string(),
                        hi: dom.name(y).to_string(),
                    });
                }
            }
        }
        Ok(Self { dom, cod, images })
    }

    /// Skips validation. Callers guarantee monotonicity.
    pub(crate) fn new_unchecked(
        dom: Arc<FinPoset>,
        cod: Arc<FinPoset>,
        images: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(images.len(), dom.len());
        Self { dom, cod, images }
    }

    /// Builds a map from `(source, target)` name pairs covering the domain.
    pub fn from_names<S: AsRef<str>>(
        dom: Arc<FinPoset>,
        cod: Arc<FinPoset>,
        pairs: &[(S, S)],
    ) -> Result<Self> {
        let mut images = vec![usize::MAX; dom.len()];
        for (a, b) in pairs {
            let x = dom.lookup(a.as_ref())?;
            if images[x] != usize::MAX {
                return Err(Error::DuplicateElement(a.as_ref().to_string()));
            }
            images[x] = cod.lookup(b.as_ref())?;
        }
        if images.contains(&usize::MAX) {
            return Err(Error::WrongArity {
                expected: dom.len(),
                got: pairs.len(),
            });
        }
        Self::new(dom, cod, images)
    }

    pub fn identity(p: Arc<FinPoset>) -> Self {
        let images = p.elements().collect();
        Self {
            dom: p.clone(),
            cod: p,
            images,
        }
    }

    pub fn constant(dom: Arc<FinPoset>, cod: Arc<FinPoset>, y: usize) -> Self {
        assert!(y < cod.len());
        let images = vec![y; dom.len()];
        Self { dom, cod, images }
    }

    /// The unique map out of the empty poset.
    pub fn from_empty(cod: Arc<FinPoset>) -> Self {
        Self {
            dom: Arc::new(FinPoset::empty()),
            cod,
            images: Vec::new(),
        }
    }

    pub fn dom(&self) -> &Arc<FinPoset> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FinPoset> {
        &self.cod
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn apply_name(&self, name: &str) -> Result<&str> {
        let x = self.dom.lookup(name)?;
        Ok(self.cod.name(self.images[x]))
    }

    /// `self ∘ first`.
    pub fn try_compose(&self, first: &MonotoneMap) -> Result<MonotoneMap> {
        if !same_poset(&first.cod, &self.dom) {
            return Err(Error::NotComposable);
        }
        Ok(Self {
            dom: first.dom.clone(),
            cod: self.cod.clone(),
            images: first.images.iter().map(|&x| self.images[x]).collect(),
        })
    }

    /// `self ∘ first`. Panics if `first` does not land in `self`'s domain.
    pub fn compose(&self, first: &MonotoneMap) -> MonotoneMap {
        self.try_compose(first).expect("composable maps")
    }

    pub fn is_parallel(&self, other: &MonotoneMap) -> bool {
        same_poset(&self.dom, &other.dom) && same_poset(&self.cod, &other.cod)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = fixedbitset::FixedBitSet::with_capacity(self.cod.len());
        self.images.iter().all(|&y| !seen.put(y))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = fixedbitset::FixedBitSet::with_capacity(self.cod.len());
        for &y in &self.images {
            seen.insert(y);
        }
        seen.count_ones(..) == self.cod.len()
    }

    /// Order-reflecting: `f(x) <= f(y)` implies `x <= y`.
    pub fn is_embedding(&self) -> bool {
        self.dom.elements().all(|x| {
            self.dom
                .elements()
                .all(|y| !self.cod.leq(self.images[x], self.images[y]) || self.dom.leq(x, y))
        })
    }

    pub fn is_iso(&self) -> bool {
        self.is_surjective() && self.is_embedding()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<MonotoneMap> {
        if !self.is_iso() {
            return None;
        }
        let mut inv = vec![0; self.cod.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Some(Self::new_unchecked(self.cod.clone(), self.dom.clone(), inv))
    }

    /// Same assignment between replacement domain and codomain with the
    /// same carriers.
    pub(crate) fn retyped(&self, dom: Arc<FinPoset>, cod: Arc<FinPoset>) -> MonotoneMap {
        Self::new_unchecked(dom, cod, self.images.clone())
    }

    /// Pointwise `self <= other`. Assumes parallel maps.
    pub fn pointwise_leq(&self, other: &MonotoneMap) -> bool {
        self.images
            .iter()
            .zip(&other.images)
            .all(|(&a, &b)| self.cod.leq(a, b))
    }
}

impl PartialEq for MonotoneMap {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images && self.is_parallel(other)
    }
}

impl Eq for MonotoneMap {}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (x, &y) in self.images.iter().enumerate() {
            if x > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}->{}", self.dom.name(x), self.cod.name(y))?;
        }
        write!(f, "}}")
    }
}

/// Outcome of comparing two parallel maps in the pointwise hom-order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapOrder {
    Equal,
    /// `f <= g`, `f != g`.
    Less,
    /// `g <= f`, `f != g`.
    Greater,
    Incomparable,
}

pub fn compare_maps(f: &MonotoneMap, g: &MonotoneMap) -> Result<MapOrder> {
    if !f.is_parallel(g) {
        return Err(Error::NotParallel);
    }
    Ok(match (f.pointwise_leq(g), g.pointwise_leq(f)) {
        (true, true) => MapOrder::Equal,
        (true, false) => MapOrder::Less,
        (false, true) => MapOrder::Greater,
        (false, false) => MapOrder::Incomparable,
    })
}

/// Order-dual of a map: the same assignment between the dual posets.
pub fn dualize_map(f: &MonotoneMap) -> MonotoneMap {
    MonotoneMap::new_unchecked(
        Arc::new(f.dom.dual()),
        Arc::new(f.cod.dual()),
        f.images.clone(),
    )
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MorphismFlags {
    pub mono: bool,
    pub epi: bool,
    pub order_mono: bool,
    pub order_epi: bool,
    pub surjective: bool,
    pub embedding: bool,
}

/// Classifies a map.
///
/// `surjective` and `embedding` are read off the assignment. The other four
/// flags are decided from their definitions by probing: monos and order-monos
/// against pairs of points `1 -> dom`, epis and order-epis against pairs of
/// maps `cod -> 2` (characteristic maps of upsets). These probes suffice in Pos
/// because the point generates and the two-element chain cogenerates.
pub fn classify_morphism(f: &MonotoneMap) -> MorphismFlags {
    let dom = f.dom();
    let cod = f.cod();

    let mut mono = true;
    let mut order_mono = true;
    for x in dom.elements() {
        for y in dom.elements() {
            let (fx, fy) = (f.apply(x), f.apply(y));
            if fx == fy && x != y {
                mono = false;
            }
            if cod.leq(fx, fy) && !dom.leq(x, y) {
                order_mono = false;
            }
        }
    }

    // Monotone maps cod -> 2 are exactly characteristic maps of upsets.
    let upsets = crate::poset::enumerate::upsets(cod);
    let mut epi = true;
    let mut order_epi = true;
    for u in &upsets {
        for v in &upsets {
            let restricted_eq = dom
                .elements()
                .all(|x| u.contains(f.apply(x)) == v.contains(f.apply(x)));
            let restricted_leq = dom
                .elements()
                .all(|x| !u.contains(f.apply(x)) || v.contains(f.apply(x)));
            if restricted_eq && u != v {
                epi = false;
            }
            if restricted_leq && !u.is_subset(v) {
                order_epi = false;
            }
        }
    }

    MorphismFlags {
        mono,
        epi,
        order_mono,
        order_epi,
        surjective: f.is_surjective(),
        embedding: f.is_embedding(),
    }
}
