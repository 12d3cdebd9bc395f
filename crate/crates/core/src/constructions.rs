//! Weighted limits and colimits in Pos.
//!
//! Limits are carved out as subposets or cartesian products. Every colimit
//! goes through [`quotient_by_relations`]: glue a disjoint union, force the
//! required inequalities, and collapse whatever order-cycles appear.

use std::collections::HashSet;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::poset::{
    fresh_name, quotient_by_relations, quotient_preferring, same_poset, unique_names, FinPoset,
    MonotoneMap, QuotientResult,
};

#[derive(Clone, Debug)]
pub struct InserterResult {
    pub object: Arc<FinPoset>,
    /// Inclusion of `object` into the common domain of the pair.
    pub arrow: MonotoneMap,
}

#[derive(Clone, Debug)]
pub struct ProductResult {
    pub object: Arc<FinPoset>,
    pub projections: Vec<MonotoneMap>,
    radices: Vec<usize>,
}

impl ProductResult {
    /// Index of the tuple with the given components.
    pub fn tuple_index(&self, components: &[usize]) -> usize {
        components
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&c, &r)| acc * r + c)
    }

    /// The induced map `⟨maps⟩ : dom -> product`.
    pub fn pairing(&self, maps: &[MonotoneMap]) -> Result<MonotoneMap> {
        if maps.len() != self.projections.len() {
            return Err(Error::WrongArity {
                expected: self.projections.len(),
                got: maps.len(),
            });
        }
        let Some(first) = maps.first() else {
            return Err(Error::DomainMismatch);
        };
        for (m, p) in maps.iter().zip(&self.projections) {
            if !same_poset(m.dom(), first.dom()) {
                return Err(Error::DomainMismatch);
            }
            if !same_poset(m.cod(), p.cod()) {
                return Err(Error::NotComposable);
            }
        }
        let images = first
            .dom()
            .elements()
            .map(|x| {
                let comps: Vec<usize> = maps.iter().map(|m| m.apply(x)).collect();
                self.tuple_index(&comps)
            })
            .collect();
        Ok(MonotoneMap::new_unchecked(
            first.dom().clone(),
            self.object.clone(),
            images,
        ))
    }
}

#[derive(Clone, Debug)]
pub struct CoproductResult {
    pub object: Arc<FinPoset>,
    pub injections: Vec<MonotoneMap>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareKind {
    Pushout,
    Cocomma,
}

/// A colimit square over a span `X <-f- A -h-> A'`.
///
/// `left_leg: X -> apex` and `right_leg: A' -> apex`; for a pushout
/// `left_leg ∘ f = right_leg ∘ h`, for a cocomma `left_leg ∘ f <= right_leg ∘ h`.
#[derive(Clone, Debug)]
pub struct ColimitSquare {
    pub apex: Arc<FinPoset>,
    pub left_leg: MonotoneMap,
    pub right_leg: MonotoneMap,
    pub kind: SquareKind,
}

#[derive(Clone, Debug)]
pub struct WidePushoutResult {
    pub apex: Arc<FinPoset>,
    pub base_leg: MonotoneMap,
    /// `cocone_legs[i]` maps the apex of square `i` into the wide pushout.
    pub cocone_legs: Vec<MonotoneMap>,
}

fn require_parallel(u: &MonotoneMap, v: &MonotoneMap) -> Result<()> {
    if u.is_parallel(v) {
        Ok(())
    } else {
        Err(Error::NotParallel)
    }
}

/// Inserter of `u, v : X -> Y`: the subposet `{ x | u(x) <= v(x) }`.
pub fn inserter(u: &MonotoneMap, v: &MonotoneMap) -> Result<InserterResult> {
    require_parallel(u, v)?;
    let dom = u.dom();
    let mut keep = FixedBitSet::with_capacity(dom.len());
    for x in dom.elements() {
        if u.cod().leq(u.apply(x), v.apply(x)) {
            keep.insert(x);
        }
    }
    Ok(subposet_inclusion(dom, &keep))
}

fn subposet_inclusion(dom: &Arc<FinPoset>, keep: &FixedBitSet) -> InserterResult {
    let (sub, members) = dom.induced(keep);
    let object = Arc::new(sub);
    let arrow = MonotoneMap::new_unchecked(object.clone(), dom.clone(), members);
    InserterResult { object, arrow }
}

/// Equalizer of `f, g`, formed as the inserter of `⟨f,g⟩, ⟨g,f⟩ : X -> Y × Y`.
pub fn equalizer(f: &MonotoneMap, g: &MonotoneMap) -> Result<InserterResult> {
    require_parallel(f, g)?;
    let square = product(&[f.cod().clone(), f.cod().clone()]);
    let fg = square.pairing(&[f.clone(), g.clone()])?;
    let gf = square.pairing(&[g.clone(), f.clone()])?;
    inserter(&fg, &gf)
}

/// Cartesian product with the componentwise order. The empty product is the
/// one-element poset.
pub fn product(factors: &[Arc<FinPoset>]) -> ProductResult {
    let radices: Vec<usize> = factors.iter().map(|p| p.len()).collect();
    let total: usize = radices.iter().product();
    let decode = |mut idx: usize| -> Vec<usize> {
        let mut comps = vec![0; radices.len()];
        for (slot, &r) in comps.iter_mut().zip(&radices).rev() {
            *slot = idx % r;
            idx /= r;
        }
        comps
    };
    let tuples: Vec<Vec<usize>> = (0..total).map(decode).collect();
    let names = unique_names(
        tuples
            .iter()
            .map(|t| {
                if t.is_empty() {
                    "pt".to_string()
                } else {
                    t.iter()
                        .zip(factors)
                        .map(|(&c, p)| p.name(c))
                        .collect::<Vec<_>>()
                        .join("_")
                }
            })
            .collect(),
    );
    let up = tuples
        .iter()
        .map(|s| {
            let mut row = FixedBitSet::with_capacity(total);
            for (j, t) in tuples.iter().enumerate() {
                if s.iter()
                    .zip(t)
                    .zip(factors)
                    .all(|((&a, &b), p)| p.leq(a, b))
                {
                    row.insert(j);
                }
            }
            row
        })
        .collect();
    let object = Arc::new(FinPoset::from_closed(names, up).expect("componentwise order"));
    let projections = factors
        .iter()
        .enumerate()
        .map(|(i, p)| {
            MonotoneMap::new_unchecked(
                object.clone(),
                p.clone(),
                tuples.iter().map(|t| t[i]).collect(),
            )
        })
        .collect();
    ProductResult {
        object,
        projections,
        radices,
    }
}

/// Disjoint union with no relations across summands. Elements of summand `i`
/// are renamed `in{i}_{name}`.
pub fn coproduct(summands: &[Arc<FinPoset>]) -> CoproductResult {
    let parts: Vec<(&Arc<FinPoset>, String)> = summands
        .iter()
        .enumerate()
        .map(|(i, p)| (p, format!("in{i}_")))
        .collect();
    let (object, offsets) = disjoint_union(None, &parts);
    let object = Arc::new(object);
    let injections = summands
        .iter()
        .zip(&offsets)
        .map(|(p, &off)| {
            MonotoneMap::new_unchecked(
                p.clone(),
                object.clone(),
                p.elements().map(|x| x + off).collect(),
            )
        })
        .collect();
    CoproductResult { object, injections }
}

/// Coinserter of `u, v : X -> Y`: the least quotient `c` of `Y` with
/// `c ∘ u <= c ∘ v`.
pub fn coinserter(u: &MonotoneMap, v: &MonotoneMap) -> Result<QuotientResult> {
    require_parallel(u, v)?;
    let forced: Vec<(usize, usize)> = u
        .dom()
        .elements()
        .map(|x| (u.apply(x), v.apply(x)))
        .collect();
    Ok(quotient_by_relations(u.cod(), &forced))
}

/// Pushout of the span `cod(f) <-f- A -h-> cod(h)`. Elements of `cod(f)` keep
/// their names; the attached copy of `cod(h)` is prefixed with `n_`.
pub fn pushout(f: &MonotoneMap, h: &MonotoneMap) -> Result<ColimitSquare> {
    glue_span(f, h, SquareKind::Pushout)
}

/// Cocomma object of `p, q` with the same domain: the couniversal square
/// with `left_leg ∘ p <= right_leg ∘ q`.
pub fn cocomma(p: &MonotoneMap, q: &MonotoneMap) -> Result<ColimitSquare> {
    glue_span(p, q, SquareKind::Cocomma)
}

fn glue_span(f: &MonotoneMap, h: &MonotoneMap, kind: SquareKind) -> Result<ColimitSquare> {
    if !same_poset(f.dom(), h.dom()) {
        return Err(Error::DomainMismatch);
    }
    let base = f.cod();
    let (union, offsets) = disjoint_union(Some(base), &[(h.cod(), "n_".to_string())]);
    let off = offsets[0];
    let mut forced = Vec::with_capacity(2 * f.dom().len());
    for a in f.dom().elements() {
        let (x, y) = (f.apply(a), h.apply(a) + off);
        forced.push((x, y));
        if kind == SquareKind::Pushout {
            forced.push((y, x));
        }
    }
    let mask = base_mask(off, union.len());
    let q = quotient_preferring(&Arc::new(union), &forced, Some(&mask));
    let apex = q.quotient.clone();
    let left_leg = restrict(&q.projection, base, 0);
    let right_leg = restrict(&q.projection, h.cod(), off);
    Ok(ColimitSquare {
        apex,
        left_leg,
        right_leg,
        kind,
    })
}

/// Wide pushout of the left legs of `squares`, all starting at `base`.
pub fn wide_pushout(base: &Arc<FinPoset>, squares: &[ColimitSquare]) -> Result<WidePushoutResult> {
    wide_pushout_tagged(base, squares, "w")
}

/// As [`wide_pushout`], with the apex of square `i` prefixed `{tag}{i}_`.
pub fn wide_pushout_tagged(
    base: &Arc<FinPoset>,
    squares: &[ColimitSquare],
    tag: &str,
) -> Result<WidePushoutResult> {
    for (i, s) in squares.iter().enumerate() {
        if !same_poset(s.left_leg.dom(), base) {
            return Err(Error::BaseMismatch(i));
        }
    }
    let parts: Vec<(&Arc<FinPoset>, String)> = squares
        .iter()
        .enumerate()
        .map(|(i, s)| (&s.apex, format!("{tag}{i}_")))
        .collect();
    let (union, offsets) = disjoint_union(Some(base), &parts);
    let mut forced = Vec::new();
    for (s, &off) in squares.iter().zip(&offsets) {
        for x in base.elements() {
            let y = s.left_leg.apply(x) + off;
            forced.push((x, y));
            forced.push((y, x));
        }
    }
    let mask = base_mask(base.len(), union.len());
    let q = quotient_preferring(&Arc::new(union), &forced, Some(&mask));
    let base_leg = restrict(&q.projection, base, 0);
    let cocone_legs = squares
        .iter()
        .zip(&offsets)
        .map(|(s, &off)| restrict(&q.projection, &s.apex, off))
        .collect();
    Ok(WidePushoutResult {
        apex: q.quotient,
        base_leg,
        cocone_legs,
    })
}

/// The first `base_len` of `total` elements.
fn base_mask(base_len: usize, total: usize) -> FixedBitSet {
    let mut m = FixedBitSet::with_capacity(total);
    m.insert_range(..base_len);
    m
}

/// `projection` restricted to the block `offset .. offset + part.len()`.
fn restrict(projection: &MonotoneMap, part: &Arc<FinPoset>, offset: usize) -> MonotoneMap {
    let images = part
        .elements()
        .map(|x| projection.apply(x + offset))
        .collect();
    MonotoneMap::new_unchecked(part.clone(), projection.cod().clone(), images)
}

/// `base` (names kept) followed by each part with its prefix. Returns the
/// union and the offset of each part.
fn disjoint_union(
    base: Option<&Arc<FinPoset>>,
    parts: &[(&Arc<FinPoset>, String)],
) -> (FinPoset, Vec<usize>) {
    let mut names: Vec<String> = base.map(|b| b.names().to_vec()).unwrap_or_default();
    let mut taken: HashSet<String> = names.iter().cloned().collect();
    let mut offsets = Vec::with_capacity(parts.len());
    for (p, prefix) in parts {
        offsets.push(names.len());
        for name in p.names() {
            let fresh = fresh_name(prefix, name, &taken);
            taken.insert(fresh.clone());
            names.push(fresh);
        }
    }
    let n = names.len();
    let mut up = Vec::with_capacity(n);
    let blocks = base
        .map(|b| (b, 0))
        .into_iter()
        .chain(parts.iter().zip(&offsets).map(|((p, _), &off)| (*p, off)));
    for (p, off) in blocks {
        for x in p.elements() {
            let mut row = FixedBitSet::with_capacity(n);
            for y in p.up(x).ones() {
                row.insert(y + off);
            }
            up.push(row);
        }
    }
    (
        FinPoset::from_closed(names, up).expect("disjoint union of posets"),
        offsets,
    )
}
