//! The lowerset monad on finite posets.
//!
//! `TX` is the poset of all downsets of `X` (the empty one included) under
//! inclusion, `η_X(x) = ↓x` and `μ_X` takes unions. Algebras are the
//! complete lattices with `α = ⋁`.

use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::kan::{object_verdict, Strength, Verdict};
use crate::poset::{
    downsets, enumerate_monotone_maps, unique_names, FinPoset, MapSearch, MonotoneMap,
};

/// Name for a downset: its maximal elements joined with `_`, or `empty`.
pub(crate) fn downset_name(p: &FinPoset, set: &FixedBitSet) -> String {
    let maximal: Vec<&str> = set
        .ones()
        .filter(|&x| p.up(x).ones().all(|y| y == x || !set.contains(y)))
        .map(|x| p.name(x))
        .collect();
    if maximal.is_empty() {
        "empty".to_string()
    } else {
        maximal.join("_")
    }
}

/// Downsets of `p` (optionally without `∅`) ordered by inclusion, in the
/// order returned by [`downsets`].
pub(crate) fn downset_poset(p: &FinPoset, include_empty: bool) -> (FinPoset, Vec<FixedBitSet>) {
    let sets: Vec<FixedBitSet> = downsets(p)
        .into_iter()
        .filter(|s| include_empty || s.count_ones(..) > 0)
        .collect();
    let names = unique_names(sets.iter().map(|s| downset_name(p, s)).collect());
    let mut pairs = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        for (j, t) in sets.iter().enumerate() {
            if i != j && s.is_subset(t) {
                pairs.push((i, j));
            }
        }
    }
    (
        FinPoset::new(names, &pairs).expect("inclusion is a partial order"),
        sets,
    )
}

/// `(TX, η_X, μ_X)` for one base poset, plus an algebra structure when one
/// has been attached.
#[derive(Clone, Debug)]
pub struct LowersetAlgebra {
    pub base: Arc<FinPoset>,
    pub tx: Arc<FinPoset>,
    /// `sets[d]` is the downset of `base` that element `d` of `tx` stands for.
    pub sets: Vec<FixedBitSet>,
    pub unit: MonotoneMap,
    pub algebra: Option<MonotoneMap>,
}

/// `T(TX)` together with `μ_X : TTX -> TX`.
#[derive(Clone, Debug)]
pub struct Multiplication {
    pub ttx: LowersetAlgebra,
    pub mult: MonotoneMap,
}

impl LowersetAlgebra {
    pub fn new(base: Arc<FinPoset>) -> Self {
        let (tx, sets) = downset_poset(&base, true);
        let tx = Arc::new(tx);
        let unit_images = base
            .elements()
            .map(|x| index_of_set(&sets, base.down(x)))
            .collect();
        let unit = MonotoneMap::new_unchecked(base.clone(), tx.clone(), unit_images);
        Self {
            base,
            tx,
            sets,
            unit,
            algebra: None,
        }
    }

    /// Attaches `α` when the base is an algebra.
    pub fn with_algebra(mut self) -> Self {
        self.algebra = algebra_structure(&self).ok();
        self
    }

    pub fn index_of(&self, set: &FixedBitSet) -> Option<usize> {
        self.sets.iter().position(|s| s == set)
    }

    /// `Tf : TX -> TY` with `Y = other.base`.
    pub fn functor(&self, other: &LowersetAlgebra, f: &MonotoneMap) -> MonotoneMap {
        assert!(
            **f.dom() == *self.base && **f.cod() == *other.base,
            "map does not match the two bases"
        );
        let images = self
            .sets
            .iter()
            .map(|d| {
                let mut image = FixedBitSet::with_capacity(other.base.len());
                image.extend(d.ones().map(|x| f.apply(x)));
                index_of_set(&other.sets, &other.base.down_closure(&image))
            })
            .collect();
        MonotoneMap::new_unchecked(self.tx.clone(), other.tx.clone(), images)
    }

    /// `T(TX)` and the union map.
    pub fn multiplication(&self) -> Multiplication {
        let ttx = LowersetAlgebra::new(self.tx.clone());
        let images = ttx
            .sets
            .iter()
            .map(|s| index_of_set(&self.sets, &self.union(s)))
            .collect();
        let mult = MonotoneMap::new_unchecked(ttx.tx.clone(), self.tx.clone(), images);
        Multiplication { ttx, mult }
    }

    /// Union of the downsets picked out by `members` (indices into `tx`).
    fn union(&self, members: &FixedBitSet) -> FixedBitSet {
        let mut u = FixedBitSet::with_capacity(self.base.len());
        for d in members.ones() {
            u.union_with(&self.sets[d]);
        }
        u
    }
}

fn index_of_set(sets: &[FixedBitSet], set: &FixedBitSet) -> usize {
    sets.iter()
        .position(|s| s == set)
        .expect("downset is enumerated")
}

pub fn lowerset(x: &Arc<FinPoset>) -> LowersetAlgebra {
    LowersetAlgebra::new(x.clone())
}

/// `Tf` between freshly built `T(dom f)` and `T(cod f)`.
pub fn lowerset_on_map(f: &MonotoneMap) -> MonotoneMap {
    lowerset(f.dom()).functor(&lowerset(f.cod()), f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport {
    pub left_unit: bool,
    pub right_unit: bool,
    pub associativity: bool,
    /// Whether associativity was checked on every element of `TTTX`, rather
    /// than on the principal downsets that generate it under unions.
    pub exhaustive: bool,
}

impl LawReport {
    pub fn holds(&self) -> bool {
        self.left_unit && self.right_unit && self.associativity
    }
}

/// Largest `TTX` for which `TTTX` is built outright.
const EXHAUSTIVE_TTX_LIMIT: usize = 12;

/// `μ ∘ ηT = id = μ ∘ Tη` and `μ ∘ μT = μ ∘ Tμ`.
pub fn monad_laws_check(x: &Arc<FinPoset>) -> LawReport {
    let t = lowerset(x);
    let Multiplication { ttx, mult } = t.multiplication();
    let id_tx = MonotoneMap::identity(t.tx.clone());
    let eta_t = ttx.unit.clone();
    let t_eta = t.functor(&ttx, &t.unit);
    let left_unit = mult.compose(&eta_t) == id_tx;
    let right_unit = mult.compose(&t_eta) == id_tx;

    let exhaustive = ttx.tx.len() <= EXHAUSTIVE_TTX_LIMIT;
    let associativity = if exhaustive {
        let Multiplication {
            ttx: tttx,
            mult: mult_t,
        } = ttx.multiplication();
        let t_mult = tttx.functor(&ttx, &mult);
        mult.compose(&mult_t) == mult.compose(&t_mult)
    } else {
        // Both sides preserve unions, and every element of TTTX is a union
        // of principal downsets ↓S with S in TTX.
        ttx.tx.elements().all(|s| {
            let via_mu_t = mult.apply(s);
            let mut image = FixedBitSet::with_capacity(t.tx.len());
            image.extend(ttx.tx.down(s).ones().map(|d| mult.apply(d)));
            let closed = t.tx.down_closure(&image);
            let via_t_mu = mult.apply(index_of_set(&ttx.sets, &closed));
            via_mu_t == via_t_mu
        })
    };
    LawReport {
        left_unit,
        right_unit,
        associativity,
        exhaustive,
    }
}

/// `Tη_X <= η_{TX}` pointwise in `TTX`.
pub fn kz_check(x: &Arc<FinPoset>) -> bool {
    let t = lowerset(x);
    let tt = lowerset(&t.tx);
    let t_eta = t.functor(&tt, &t.unit);
    t_eta.pointwise_leq(&tt.unit.retyped(t.tx.clone(), tt.tx.clone()))
}

/// Either `α : TX -> X` sending every downset to its join, or the first
/// downset (scanning from the top of `TX`) without one.
pub fn algebra_structure(t: &LowersetAlgebra) -> Result<MonotoneMap, FixedBitSet> {
    let mut images = vec![0; t.tx.len()];
    for &d in t.tx.linear_extension().iter().rev() {
        match t.base.join(&t.sets[d]) {
            Some(j) => images[d] = j,
            None => return Err(t.sets[d].clone()),
        }
    }
    Ok(MonotoneMap::new_unchecked(
        t.tx.clone(),
        t.base.clone(),
        images,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraLaws {
    /// `α ∘ η = id`.
    pub retraction: bool,
    /// `id <= η ∘ α`.
    pub adjunction: bool,
    /// `α ∘ Tα = α ∘ μ`.
    pub associativity: bool,
}

impl AlgebraLaws {
    pub fn holds(&self) -> bool {
        self.retraction && self.adjunction && self.associativity
    }
}

pub fn algebra_laws_check(t: &LowersetAlgebra, alpha: &MonotoneMap) -> AlgebraLaws {
    let retraction = alpha.compose(&t.unit) == MonotoneMap::identity(t.base.clone());
    let adjunction = MonotoneMap::identity(t.tx.clone()).pointwise_leq(&t.unit.compose(alpha));
    let Multiplication { ttx, mult } = t.multiplication();
    let t_alpha = ttx.functor(t, alpha);
    let associativity = alpha.compose(&t_alpha) == alpha.compose(&mult);
    AlgebraLaws {
        retraction,
        adjunction,
        associativity,
    }
}

/// `r : C -> X` with a section `s` such that `r ∘ s = id_X` and `id_C <= s ∘ r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoprojectionWitness {
    pub r: MonotoneMap,
    pub s: MonotoneMap,
}

impl CoprojectionWitness {
    pub fn holds(&self) -> bool {
        let r = &self.r;
        let s = &self.s;
        **s.dom() == **r.cod()
            && **s.cod() == **r.dom()
            && s.images().iter().enumerate().all(|(x, &c)| r.apply(c) == x)
            && r.dom()
                .elements()
                .all(|c| r.dom().leq(c, s.apply(r.apply(c))))
    }
}

/// Searches for a section `s` witnessing that `r` is a coprojection.
pub fn is_coprojection(r: &MonotoneMap) -> Option<CoprojectionWitness> {
    if !r.is_surjective() {
        return None;
    }
    let c = r.dom();
    let x = r.cod();
    // s(x) must lie in the fibre over x and above every c with r(c) = x.
    let allowed: Vec<FixedBitSet> = x
        .elements()
        .map(|y| {
            let mut fibre = FixedBitSet::with_capacity(c.len());
            fibre.extend(c.elements().filter(|&e| r.apply(e) == y));
            let mut above = fibre.clone();
            for e in fibre.ones() {
                above.intersect_with(c.up(e));
            }
            above
        })
        .collect();
    let mut search = MapSearch::new(x.clone(), c.clone()).with_allowed(allowed);
    let s = search.next_assignment()?.to_vec();
    let w = CoprojectionWitness {
        r: r.clone(),
        s: MonotoneMap::new_unchecked(x.clone(), c.clone(), s),
    };
    debug_assert!(w.holds());
    Some(w)
}

/// A square `g ∘ r1 = r2 ∘ f` with `r1`, `r2` coprojections.
#[derive(Clone, Debug)]
pub struct CoprojectionSquare {
    pub f: MonotoneMap,
    pub g: MonotoneMap,
    pub r1: MonotoneMap,
    pub r2: MonotoneMap,
}

#[derive(Clone, Debug)]
pub enum ClosureCounterexample {
    /// `dom(r)` is in `LInj(H)` but `cod(r)` is not.
    Object { r: MonotoneMap, h_index: usize },
    /// `f` is in `LInj(H)` but `g` is not.
    Square {
        square: Box<CoprojectionSquare>,
        h_index: usize,
    },
}

/// Closure of `LInj(H)` under the sampled coprojections and squares. Samples
/// whose hypotheses fail are skipped.
pub fn coprojection_closure_check(
    hs: &[MonotoneMap],
    coprojections: &[MonotoneMap],
    squares: &[CoprojectionSquare],
) -> Result<(), ClosureCounterexample> {
    for r in coprojections {
        if is_coprojection(r).is_none() {
            continue;
        }
        let source_ok = hs
            .iter()
            .all(|h| object_verdict(r.dom(), h, Strength::Strong).holds());
        if !source_ok {
            continue;
        }
        if let Some(h_index) = hs
            .iter()
            .position(|h| !object_verdict(r.cod(), h, Strength::Strong).holds())
        {
            return Err(ClosureCounterexample::Object {
                r: r.clone(),
                h_index,
            });
        }
    }
    for sq in squares {
        let commutes = sq.g.compose(&sq.r1) == sq.r2.compose(&sq.f);
        if !commutes || is_coprojection(&sq.r1).is_none() || is_coprojection(&sq.r2).is_none() {
            continue;
        }
        for (h_index, h) in hs.iter().enumerate() {
            if !crate::kan::is_left_kan_injective_morphism(&sq.f, h).holds() {
                break;
            }
            if !crate::kan::is_left_kan_injective_morphism(&sq.g, h).holds() {
                return Err(ClosureCounterexample::Square {
                    square: Box::new(sq.clone()),
                    h_index,
                });
            }
        }
    }
    Ok(())
}

/// One row of [`units_injectivity_crosscheck`].
#[derive(Clone, Debug)]
pub struct UnitsRow {
    pub index: usize,
    pub algebra: bool,
    /// Kan-injective with respect to `η_Y` for every `Y` in the family.
    pub injective_for_all: bool,
    /// For non-algebras: the first `Y` whose unit defeats this poset.
    pub defeated_by: Option<usize>,
}

/// Relates algebras to injectivity with respect to the units of a finite
/// family. Only "algebra implies injective" is a theorem; the converse is
/// checked against the units at hand and can only be family-relative.
#[derive(Clone, Debug)]
pub struct UnitsReport {
    pub rows: Vec<UnitsRow>,
}

impl UnitsReport {
    /// Every algebra is injective with respect to every unit.
    pub fn forward_holds(&self) -> bool {
        self.rows.iter().all(|r| !r.algebra || r.injective_for_all)
    }

    /// Every non-algebra is defeated by some unit of the family.
    pub fn converse_within_family(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.algebra || r.defeated_by.is_some())
    }
}

pub fn units_injectivity_crosscheck(family: &[Arc<FinPoset>]) -> UnitsReport {
    let units: Vec<MonotoneMap> = family.iter().map(|y| lowerset(y).unit).collect();
    let rows = family
        .iter()
        .enumerate()
        .map(|(index, x)| {
            let algebra = algebra_structure(&lowerset(x)).is_ok();
            let defeated_by = units
                .iter()
                .position(|eta| !object_verdict(x, eta, Strength::Strong).holds());
            UnitsRow {
                index,
                algebra,
                injective_for_all: defeated_by.is_none(),
                defeated_by,
            }
        })
        .collect();
    UnitsReport { rows }
}

/// `p ∘ α_X = α_Y ∘ Tp`.
pub fn is_algebra_morphism(
    tx: &LowersetAlgebra,
    ty: &LowersetAlgebra,
    p: &MonotoneMap,
) -> Option<bool> {
    let ax = algebra_structure(tx).ok()?;
    let ay = algebra_structure(ty).ok()?;
    Some(p.compose(&ax) == ay.compose(&tx.functor(ty, p)))
}

/// Injectivity of `x` with respect to a unit, with the counterexample.
pub fn unit_verdict(x: &Arc<FinPoset>, y: &Arc<FinPoset>) -> Verdict {
    object_verdict(x, &lowerset(y).unit, Strength::Strong)
}

/// All coprojections `C -> X`, each with the first section found.
pub fn coprojections_between(c: &Arc<FinPoset>, x: &Arc<FinPoset>) -> Vec<CoprojectionWitness> {
    enumerate_monotone_maps(c, x)
        .filter_map(|r| is_coprojection(&r))
        .collect()
}
