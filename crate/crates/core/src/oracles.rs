//! Ground truth that does not go through the reflection engine.
//!
//! Free constructions are built directly from downsets, isomorphisms are
//! found by exact backtracking, and [`verify_reflection`] checks the
//! universal property of a candidate against a finite family of targets.

use std::collections::HashSet;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::kan::{
    membership, preservation_verdict, Counterexample, LanTable, Side, Strength, Subject,
};
use crate::monads::downset_poset;
use crate::poset::{enumerate_monotone_maps, FinPoset, MapSearch, MonotoneMap};
use crate::reflection::{run_reflection, Mode};
use crate::samples::letters;

fn principal_unit(p: &Arc<FinPoset>, include_empty: bool) -> (Arc<FinPoset>, MonotoneMap) {
    let (carrier, sets) = downset_poset(p, include_empty);
    let carrier = Arc::new(carrier);
    let images = p
        .elements()
        .map(|x| {
            sets.iter()
                .position(|s| s == p.down(x))
                .expect("principal downset")
        })
        .collect();
    let unit = MonotoneMap::new(p.clone(), carrier.clone(), images).expect("↓ is monotone");
    (carrier, unit)
}

/// Nonempty downsets of `p` under inclusion, with `x ↦ ↓x`.
pub fn free_join_semilattice(p: &Arc<FinPoset>) -> (Arc<FinPoset>, MonotoneMap) {
    principal_unit(p, false)
}

/// All downsets of `p`, the empty one included, with `x ↦ ↓x`.
pub fn downset_completion(p: &Arc<FinPoset>) -> (Arc<FinPoset>, MonotoneMap) {
    principal_unit(p, true)
}

/// An order isomorphism `a -> b`, if there is one.
pub fn find_isomorphism(a: &Arc<FinPoset>, b: &Arc<FinPoset>) -> Option<MonotoneMap> {
    let fixed = vec![None; a.len()];
    iso_search(a, b, fixed)
}

/// An isomorphism `φ : cod(u) -> cod(v)` with `φ ∘ u = v`.
pub fn find_isomorphism_under(u: &MonotoneMap, v: &MonotoneMap) -> Option<MonotoneMap> {
    if **u.dom() != **v.dom() {
        return None;
    }
    let mut fixed = vec![None; u.cod().len()];
    for x in u.dom().elements() {
        match fixed[u.apply(x)] {
            Some(y) if y != v.apply(x) => return None,
            _ => fixed[u.apply(x)] = Some(v.apply(x)),
        }
    }
    iso_search(u.cod(), v.cod(), fixed)
}

fn iso_search(
    a: &Arc<FinPoset>,
    b: &Arc<FinPoset>,
    fixed: Vec<Option<usize>>,
) -> Option<MonotoneMap> {
    if a.len() != b.len() {
        return None;
    }
    let signature = |p: &FinPoset, x: usize| (p.up(x).count_ones(..), p.down(x).count_ones(..));
    let n = a.len();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn go(
        a: &FinPoset,
        b: &FinPoset,
        x: usize,
        image: &mut [usize],
        used: &mut [bool],
        fixed: &[Option<usize>],
        signature: &dyn Fn(&FinPoset, usize) -> (usize, usize),
    ) -> bool {
        if x == a.len() {
            return true;
        }
        for y in 0..b.len() {
            if used[y] || fixed[x].is_some_and(|f| f != y) || signature(a, x) != signature(b, y) {
                continue;
            }
            let consistent = (0..x)
                .all(|z| a.leq(x, z) == b.leq(y, image[z]) && a.leq(z, x) == b.leq(image[z], y));
            if !consistent {
                continue;
            }
            image[x] = y;
            used[y] = true;
            if go(a, b, x + 1, image, used, fixed, signature) {
                return true;
            }
            used[y] = false;
        }
        false
    }

    if go(a, b, 0, &mut image, &mut used, &fixed, &signature) {
        Some(MonotoneMap::new(a.clone(), b.clone(), image).expect("isomorphism is monotone"))
    } else {
        None
    }
}

pub fn is_isomorphic(a: &Arc<FinPoset>, b: &Arc<FinPoset>) -> bool {
    find_isomorphism(a, b).is_some()
}

/// One representative of every isomorphism class of posets with `n`
/// elements, named `a, b, c, ...`.
pub fn enumerate_posets(n: usize) -> Vec<FinPoset> {
    assert!(n <= 6, "poset enumeration is limited to 6 elements");
    // Every poset has a labelling in which i < j whenever i is below j.
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let rel: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &p)| p)
            .collect();
        let holds = |i: usize, j: usize| i == j || rel.contains(&(i, j));
        let transitive = rel
            .iter()
            .all(|&(i, j)| (j + 1..n).all(|k| !holds(j, k) || holds(i, k)));
        if !transitive {
            continue;
        }
        let canonical = perms
            .iter()
            .map(|perm| {
                rel.iter()
                    .fold(0u64, |acc, &(i, j)| acc | 1 << (perm[i] * n + perm[j]))
            })
            .min()
            .unwrap_or(0);
        if seen.insert(canonical) {
            out.push(FinPoset::new(letters(n), &rel).expect("acyclic by construction"));
        }
    }
    out
}

/// Representatives of all posets with at most `n` elements, smallest first.
pub fn posets_up_to(n: usize) -> Vec<Arc<FinPoset>> {
    (0..=n).flat_map(enumerate_posets).map(Arc::new).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..n {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub enum ReflectionFailure {
    CandidateNotMember {
        h_index: usize,
        counterexample: Option<Counterexample>,
    },
    TargetNotMember {
        target: usize,
    },
    NoFactorization {
        target: usize,
        p: MonotoneMap,
    },
    NotUnique {
        target: usize,
        p: MonotoneMap,
        count: usize,
    },
}

/// Checks that `unit : X -> C` is a reflection into `LInj(H)` as far as the
/// given targets can tell: `C` is a member, and every `p : X -> P` factors
/// through `unit` by exactly one Kan-injective morphism.
pub fn verify_reflection(
    unit: &MonotoneMap,
    hs: &[MonotoneMap],
    targets: &[Arc<FinPoset>],
) -> Result<(), ReflectionFailure> {
    let candidate = unit.cod();
    let report = membership(&Subject::Object(candidate.clone()), hs, Side::Left);
    if let Some(bad) = report.first_failure() {
        return Err(ReflectionFailure::CandidateNotMember {
            h_index: bad.h_index,
            counterexample: bad.verdict.counterexample().cloned(),
        });
    }
    let own: Vec<LanTable> = hs.iter().map(|h| LanTable::new(candidate, h)).collect();
    for (t, target) in targets.iter().enumerate() {
        let theirs: Vec<LanTable> = hs.iter().map(|h| LanTable::new(target, h)).collect();
        if theirs
            .iter()
            .any(|table| !table.object_verdict(Strength::Strong).holds())
        {
            return Err(ReflectionFailure::TargetNotMember { target: t });
        }
        for p in enumerate_monotone_maps(unit.dom(), target) {
            let count = count_factorizations(unit, &p, &own, &theirs, 2);
            match count {
                0 => return Err(ReflectionFailure::NoFactorization { target: t, p }),
                1 => {}
                _ => {
                    return Err(ReflectionFailure::NotUnique {
                        target: t,
                        p,
                        count,
                    })
                }
            }
        }
    }
    Ok(())
}

/// Number of Kan-injective `q` with `q ∘ unit = p`, counted up to `limit`.
pub fn count_factorizations(
    unit: &MonotoneMap,
    p: &MonotoneMap,
    own: &[LanTable],
    theirs: &[LanTable],
    limit: usize,
) -> usize {
    let candidate = unit.cod();
    let target = p.cod();
    let mut allowed = vec![target.all(); candidate.len()];
    for x in unit.dom().elements() {
        let mut only = FixedBitSet::with_capacity(target.len());
        only.insert(p.apply(x));
        allowed[unit.apply(x)].intersect_with(&only);
    }
    let mut search = MapSearch::new(candidate.clone(), target.clone()).with_allowed(allowed);
    let mut count = 0;
    while let Some(q) = search.next_assignment() {
        let q = MonotoneMap::new(candidate.clone(), target.clone(), q.to_vec())
            .expect("search yields monotone maps");
        if own
            .iter()
            .zip(theirs)
            .all(|(a, b)| preservation_verdict(&q, a, b).holds())
        {
            count += 1;
            if count >= limit {
                break;
            }
        }
    }
    count
}

#[derive(Clone, Debug)]
pub struct WeakStrongRow {
    pub index: usize,
    pub weak_member: bool,
    /// Strong membership with respect to the collected units.
    pub strong_member: bool,
}

/// Compares `wLInj(H)` with `LInj(H̄_U)`, where `H̄_U` are the weak
/// reflection units of the universe `U`. Only `wLInj ⊆ LInj(H̄_U)` is exact;
/// the other direction is relative to `U`.
#[derive(Clone, Debug)]
pub struct WeakStrongReport {
    pub units: Vec<MonotoneMap>,
    pub rows: Vec<WeakStrongRow>,
    /// Universe members whose weak chain did not converge within the budget
    /// or stage limit; they contribute no unit.
    pub unconverged: Vec<usize>,
}

impl WeakStrongReport {
    pub fn inclusion_holds(&self) -> bool {
        self.rows.iter().all(|r| !r.weak_member || r.strong_member)
    }

    /// Holds relative to the universe only.
    pub fn converse_within_universe(&self) -> bool {
        self.rows.iter().all(|r| !r.strong_member || r.weak_member)
    }
}

pub fn weak_equals_strong_probe(
    hs: &[MonotoneMap],
    universe: &[Arc<FinPoset>],
    budget: usize,
) -> Result<WeakStrongReport> {
    let mut units = Vec::with_capacity(universe.len());
    let mut unconverged = Vec::new();
    for (i, x) in universe.iter().enumerate() {
        match run_reflection(x.clone(), hs.to_vec(), budget, Mode::Weak) {
            Ok(trace) => units.push(trace.reflection().expect("run returns converged traces").1),
            Err(Error::BudgetExceeded { .. } | Error::StageTooLarge { .. }) => unconverged.push(i),
            Err(e) => return Err(e),
        }
    }
    let rows = universe
        .iter()
        .enumerate()
        .map(|(index, x)| {
            let subject = Subject::Object(x.clone());
            WeakStrongRow {
                index,
                weak_member: membership(&subject, hs, Side::WeakLeft).holds(),
                strong_member: membership(&subject, &units, Side::Left).holds(),
            }
        })
        .collect();
    Ok(WeakStrongReport {
        units,
        rows,
        unconverged,
    })
}
