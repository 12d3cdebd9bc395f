use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::Result;

use super::{transitive_closure, FinPoset, MonotoneMap};

/// A quotient poset together with its surjective projection.
#[derive(Clone, Debug)]
pub struct QuotientResult {
    pub quotient: Arc<FinPoset>,
    pub projection: MonotoneMap,
    /// Members of each quotient element, as indices into the source.
    pub classes: Vec<Vec<usize>>,
}

/// Least poset quotient of `x` in which every forced pair `(a, b)` satisfies
/// `[a] <= [b]`.
///
/// The order of `x` plus the forced pairs is closed transitively; elements
/// that end up below each other are collapsed into one class. Each class is
/// named after its lexicographically least member.
pub fn quotient_by_relations(x: &Arc<FinPoset>, forced: &[(usize, usize)]) -> QuotientResult {
    quotient_preferring(x, forced, None)
}

pub fn quotient_by_named_relations<S: AsRef<str>>(
    x: &Arc<FinPoset>,
    forced: &[(S, S)],
) -> Result<QuotientResult> {
    let pairs = forced
        .iter()
        .map(|(a, b)| Ok((x.lookup(a.as_ref())?, x.lookup(b.as_ref())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(quotient_by_relations(x, &pairs))
}

/// As [`quotient_by_relations`], but a class containing any element of
/// `preferred` is named after its least preferred member.
pub(crate) fn quotient_preferring(
    x: &Arc<FinPoset>,
    forced: &[(usize, usize)],
    preferred: Option<&FixedBitSet>,
) -> QuotientResult {
    let n = x.len();
    let mut up: Vec<FixedBitSet> = x.elements().map(|e| x.up(e).clone()).collect();
    if !forced.is_empty() {
        for &(a, b) in forced {
            up[a].insert(b);
        }
        transitive_closure(&mut up);
    }

    // Classes in order of their first member.
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for e in 0..n {
        if class_of[e] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let members: Vec<usize> = up[e].ones().filter(|&f| up[f].contains(e)).collect();
        for &m in &members {
            class_of[m] = id;
        }
        classes.push(members);
    }

    let names: Vec<String> = classes
        .iter()
        .map(|members| {
            let pick = |pool: &mut dyn Iterator<Item = &usize>| {
                pool.map(|&m| x.name(m)).min().map(str::to_string)
            };
            preferred
                .and_then(|p| pick(&mut members.iter().filter(|&&m| p.contains(m))))
                .or_else(|| pick(&mut members.iter()))
                .expect("nonempty class")
        })
        .collect();

    let k = classes.len();
    let q_up: Vec<FixedBitSet> = classes
        .iter()
        .map(|members| {
            let mut row = FixedBitSet::with_capacity(k);
            for f in up[members[0]].ones() {
                row.insert(class_of[f]);
            }
            row
        })
        .collect();
    let quotient =
        Arc::new(FinPoset::from_closed(names, q_up).expect("antisymmetric by construction"));
    let projection = MonotoneMap::new_unchecked(x.clone(), quotient.clone(), class_of);
    QuotientResult {
        quotient,
        projection,
        classes,
    }
}
