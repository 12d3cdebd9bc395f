//! Kan extensions along monotone maps and Kan-injectivity.
//!
//! For `h: A -> A'` and `f: A -> X`, the left Kan extension `Lan_h f` is the
//! least monotone `g: A' -> X` with `f <= g ∘ h`. It is found here by
//! searching every candidate `g`; the closed join formula
//! [`pointwise_join_extension`] is a separate route used to cross-check it.
//! Right-handed notions are computed exclusively by dualizing.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::poset::{
    attainable_images, dualize_map, enumerate_monotone_maps, same_poset, FinPoset, MapSearch,
    MonotoneMap,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionVerdict {
    /// A least extension exists; `strict` when `extension ∘ h = f`.
    Exists {
        extension: MonotoneMap,
        strict: bool,
    },
    /// No `g` with `f <= g ∘ h` at all.
    NoExtension,
    /// Candidates exist but none is below all the others.
    NoLeast,
}

impl ExtensionVerdict {
    pub fn extension(&self) -> Option<&MonotoneMap> {
        match self {
            ExtensionVerdict::Exists { extension, .. } => Some(extension),
            _ => None,
        }
    }

    pub fn exists(&self) -> bool {
        matches!(self, ExtensionVerdict::Exists { .. })
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, ExtensionVerdict::Exists { strict: true, .. })
    }
}

/// `Lan_h f`, by exhaustive search over all monotone `g: cod(h) -> cod(f)`
/// with `f <= g ∘ h`.
pub fn least_extension(h: &MonotoneMap, f: &MonotoneMap) -> Result<ExtensionVerdict> {
    if !same_poset(h.dom(), f.dom()) {
        return Err(Error::DomainMismatch);
    }
    Ok(least_extension_unchecked(h, f.cod(), f.images()))
}

fn least_extension_unchecked(h: &MonotoneMap, x: &Arc<FinPoset>, f: &[usize]) -> ExtensionVerdict {
    let target = h.cod();
    let mut allowed = vec![x.all(); target.len()];
    for (a, &fa) in f.iter().enumerate() {
        allowed[h.apply(a)].intersect_with(x.up(fa));
    }
    let seen = attainable_images(target, x, &allowed);
    // One element with a value means a whole map exists.
    let any = target.is_empty() || !seen[0].is_clear();
    if !any {
        return ExtensionVerdict::NoExtension;
    }
    let Some(least) = seen
        .iter()
        .map(|vals| x.least_of(vals))
        .collect::<Option<Vec<usize>>>()
    else {
        return ExtensionVerdict::NoLeast;
    };
    let monotone = target.elements().all(|b| {
        target.lower_covers()[b]
            .iter()
            .all(|&c| x.leq(least[c], least[b]))
    });
    if !monotone {
        return ExtensionVerdict::NoLeast;
    }
    let strict = f.iter().enumerate().all(|(a, &fa)| least[h.apply(a)] == fa);
    ExtensionVerdict::Exists {
        extension: MonotoneMap::new_unchecked(target.clone(), x.clone(), least),
        strict,
    }
}

/// `Ran_h f`: the greatest `g` with `g ∘ h <= f`, computed as the left Kan
/// extension in the order-duals.
pub fn greatest_extension(h: &MonotoneMap, f: &MonotoneMap) -> Result<ExtensionVerdict> {
    if !same_poset(h.dom(), f.dom()) {
        return Err(Error::DomainMismatch);
    }
    let dh = dualize_map(h);
    let df = dualize_map(f).retyped(dh.dom().clone(), Arc::new(f.cod().dual()));
    Ok(match least_extension(&dh, &df)? {
        ExtensionVerdict::Exists { extension, strict } => ExtensionVerdict::Exists {
            extension: extension.retyped(h.cod().clone(), f.cod().clone()),
            strict,
        },
        other => other,
    })
}

/// `b ↦ ⋁ { f(a) | h(a) <= b }`, when every one of these joins exists.
pub fn pointwise_join_extension(h: &MonotoneMap, f: &MonotoneMap) -> Result<Option<MonotoneMap>> {
    if !same_poset(h.dom(), f.dom()) {
        return Err(Error::DomainMismatch);
    }
    let x = f.cod();
    let target = h.cod();
    let mut images = Vec::with_capacity(target.len());
    for b in target.elements() {
        let mut below = FixedBitSet::with_capacity(x.len());
        for a in h.dom().elements() {
            if target.leq(h.apply(a), b) {
                below.insert(f.apply(a));
            }
        }
        match x.join(&below) {
            Some(j) => images.push(j),
            None => return Ok(None),
        }
    }
    Ok(Some(MonotoneMap::new_unchecked(
        target.clone(),
        x.clone(),
        images,
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strength {
    Strong,
    Weak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Failure {
    NoExtension,
    NoLeast,
    /// The least extension exists but does not restrict back to `f`.
    NotStrict,
    /// `p ∘ Lan_h f != Lan_h (p ∘ f)`.
    NotPreserved,
    NoFiller,
    ManyFillers,
}

/// Where a counterexample lives when the subject is a morphism `p: X -> Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    /// The subject object, or the morphism itself.
    Subject,
    Source,
    Target,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub f: MonotoneMap,
    pub failure: Failure,
    pub at: Endpoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(Counterexample),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(c) => Some(c),
        }
    }

    fn at(self, at: Endpoint) -> Self {
        match self {
            Verdict::Fails(mut c) => {
                c.at = at;
                Verdict::Fails(c)
            }
            v => v,
        }
    }
}

/// Every `Lan_h f` for `f: dom(h) -> X`, keyed by the assignment of `f`.
///
/// Built once per `(X, h)` so that morphism checks against many `p` do not
/// redo the searches.
#[derive(Clone, Debug)]
pub struct LanTable {
    pub object: Arc<FinPoset>,
    pub h: MonotoneMap,
    /// All `f` in canonical order with their verdicts.
    pub entries: Vec<(MonotoneMap, ExtensionVerdict)>,
    index: HashMap<Vec<usize>, usize>,
}

impl LanTable {
    pub fn new(object: &Arc<FinPoset>, h: &MonotoneMap) -> Self {
        let entries: Vec<(MonotoneMap, ExtensionVerdict)> =
            enumerate_monotone_maps(h.dom(), object)
                .map(|f| {
                    let v = least_extension_unchecked(h, object, f.images());
                    (f, v)
                })
                .collect();
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (f, _))| (f.images().to_vec(), i))
            .collect();
        Self {
            object: object.clone(),
            h: h.clone(),
            entries,
            index,
        }
    }

    pub fn lookup(&self, f: &[usize]) -> Option<&ExtensionVerdict> {
        self.index.get(f).map(|&i| &self.entries[i].1)
    }

    /// First `f` whose extension fails the object condition.
    pub fn object_verdict(&self, strength: Strength) -> Verdict {
        for (f, v) in &self.entries {
            let failure = match v {
                ExtensionVerdict::NoExtension => Some(Failure::NoExtension),
                ExtensionVerdict::NoLeast => Some(Failure::NoLeast),
                ExtensionVerdict::Exists { strict: false, .. } if strength == Strength::Strong => {
                    Some(Failure::NotStrict)
                }
                ExtensionVerdict::Exists { .. } => None,
            };
            if let Some(failure) = failure {
                return Verdict::Fails(Counterexample {
                    f: f.clone(),
                    failure,
                    at: Endpoint::Subject,
                });
            }
        }
        Verdict::Holds
    }
}

/// Morphism condition for `p`, given the tables of its endpoints.
pub fn morphism_verdict(
    p: &MonotoneMap,
    source: &LanTable,
    target: &LanTable,
    strength: Strength,
) -> Verdict {
    let src = source.object_verdict(strength).at(Endpoint::Source);
    if !src.holds() {
        return src;
    }
    let tgt = target.object_verdict(strength).at(Endpoint::Target);
    if !tgt.holds() {
        return tgt;
    }
    preservation_verdict(p, source, target)
}

/// `p ∘ Lan_h f = Lan_h (p ∘ f)` for every `f`, assuming both endpoint
/// tables already satisfy the object condition.
pub fn preservation_verdict(p: &MonotoneMap, source: &LanTable, target: &LanTable) -> Verdict {
    for (f, v) in &source.entries {
        let lan = v.extension().expect("source is injective");
        let pf: Vec<usize> = f.images().iter().map(|&x| p.apply(x)).collect();
        let lan_pf = target
            .lookup(&pf)
            .and_then(ExtensionVerdict::extension)
            .expect("target is injective");
        if lan
            .images()
            .iter()
            .zip(lan_pf.images())
            .any(|(&l, &r)| p.apply(l) != r)
        {
            return Verdict::Fails(Counterexample {
                f: f.clone(),
                failure: Failure::NotPreserved,
                at: Endpoint::Subject,
            });
        }
    }
    Verdict::Holds
}

pub fn is_left_kan_injective_object(x: &Arc<FinPoset>, h: &MonotoneMap) -> Verdict {
    object_verdict(x, h, Strength::Strong)
}

pub fn is_left_kan_injective_morphism(p: &MonotoneMap, h: &MonotoneMap) -> Verdict {
    morphism_check(p, h, Strength::Strong)
}

pub fn is_weakly_left_kan_injective_object(x: &Arc<FinPoset>, h: &MonotoneMap) -> Verdict {
    object_verdict(x, h, Strength::Weak)
}

pub fn is_weakly_left_kan_injective_morphism(p: &MonotoneMap, h: &MonotoneMap) -> Verdict {
    morphism_check(p, h, Strength::Weak)
}

/// Object condition, stopping at the first failing `f` in canonical order.
pub fn object_verdict(x: &Arc<FinPoset>, h: &MonotoneMap, strength: Strength) -> Verdict {
    for f in enumerate_monotone_maps(h.dom(), x) {
        let failure = match least_extension_unchecked(h, x, f.images()) {
            ExtensionVerdict::NoExtension => Some(Failure::NoExtension),
            ExtensionVerdict::NoLeast => Some(Failure::NoLeast),
            ExtensionVerdict::Exists { strict: false, .. } if strength == Strength::Strong => {
                Some(Failure::NotStrict)
            }
            ExtensionVerdict::Exists { .. } => None,
        };
        if let Some(failure) = failure {
            return Verdict::Fails(Counterexample {
                f,
                failure,
                at: Endpoint::Subject,
            });
        }
    }
    Verdict::Holds
}

pub fn morphism_check(p: &MonotoneMap, h: &MonotoneMap, strength: Strength) -> Verdict {
    let src = object_verdict(p.dom(), h, strength).at(Endpoint::Source);
    if !src.holds() {
        return src;
    }
    let tgt = object_verdict(p.cod(), h, strength).at(Endpoint::Target);
    if !tgt.holds() {
        return tgt;
    }
    preservation_verdict(p, &LanTable::new(p.dom(), h), &LanTable::new(p.cod(), h))
}

/// Every `f: dom(h) -> X` has exactly one `g` with `g ∘ h = f`.
pub fn is_orthogonal(x: &Arc<FinPoset>, h: &MonotoneMap) -> Verdict {
    for f in enumerate_monotone_maps(h.dom(), x) {
        let mut allowed = vec![x.all(); h.cod().len()];
        for a in h.dom().elements() {
            let mut only = FixedBitSet::with_capacity(x.len());
            only.insert(f.apply(a));
            allowed[h.apply(a)].intersect_with(&only);
        }
        let mut search = MapSearch::new(h.cod().clone(), x.clone()).with_allowed(allowed);
        let mut fillers = 0;
        while fillers < 2 && search.next_assignment().is_some() {
            fillers += 1;
        }
        if fillers != 1 {
            let failure = if fillers == 0 {
                Failure::NoFiller
            } else {
                Failure::ManyFillers
            };
            return Verdict::Fails(Counterexample {
                f,
                failure,
                at: Endpoint::Subject,
            });
        }
    }
    Verdict::Holds
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subject {
    Object(Arc<FinPoset>),
    Morphism(MonotoneMap),
}

impl Subject {
    fn dual(&self) -> Subject {
        match self {
            Subject::Object(x) => Subject::Object(Arc::new(x.dual())),
            Subject::Morphism(p) => Subject::Morphism(dualize_map(p)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    WeakLeft,
}

#[derive(Clone, Debug)]
pub struct HVerdict {
    pub h_index: usize,
    /// The subject object, or both endpoints of the subject morphism.
    pub object_ok: bool,
    /// Preservation of extensions; `None` for object subjects.
    pub morphism_ok: Option<bool>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct InjectivityReport {
    pub subject: Subject,
    pub side: Side,
    pub entries: Vec<HVerdict>,
}

impl InjectivityReport {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.verdict.holds())
    }

    /// First failing entry.
    pub fn first_failure(&self) -> Option<&HVerdict> {
        self.entries.iter().find(|e| !e.verdict.holds())
    }
}

/// Membership of an object or morphism in `LInj(H)`, `RInj(H)` or `wLInj(H)`.
pub fn membership(subject: &Subject, hs: &[MonotoneMap], side: Side) -> InjectivityReport {
    let entries = match side {
        Side::Left => left_entries(subject, hs, Strength::Strong),
        Side::WeakLeft => left_entries(subject, hs, Strength::Weak),
        Side::Right => {
            let dual_hs: Vec<MonotoneMap> = hs.iter().map(dualize_map).collect();
            let mut entries = left_entries(&subject.dual(), &dual_hs, Strength::Strong);
            for e in &mut entries {
                if let Verdict::Fails(c) = &mut e.verdict {
                    let cod = match (subject, c.at) {
                        (Subject::Object(x), _) => x.clone(),
                        (Subject::Morphism(p), Endpoint::Target) => p.cod().clone(),
                        (Subject::Morphism(p), _) => p.dom().clone(),
                    };
                    c.f = c.f.retyped(hs[e.h_index].dom().clone(), cod);
                }
            }
            entries
        }
    };
    InjectivityReport {
        subject: subject.clone(),
        side,
        entries,
    }
}

fn left_entries(subject: &Subject, hs: &[MonotoneMap], strength: Strength) -> Vec<HVerdict> {
    hs.iter()
        .enumerate()
        .map(|(h_index, h)| match subject {
            Subject::Object(x) => {
                let verdict = object_verdict(x, h, strength);
                HVerdict {
                    h_index,
                    object_ok: verdict.holds(),
                    morphism_ok: None,
                    verdict,
                }
            }
            Subject::Morphism(p) => {
                let verdict = morphism_check(p, h, strength);
                let endpoint_failure = matches!(
                    verdict.counterexample(),
                    Some(Counterexample {
                        at: Endpoint::Source | Endpoint::Target,
                        ..
                    })
                );
                HVerdict {
                    h_index,
                    object_ok: !endpoint_failure,
                    morphism_ok: Some(verdict.holds()),
                    verdict,
                }
            }
        })
        .collect()
}
