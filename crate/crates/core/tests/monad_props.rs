mod common;

use std::sync::Arc;

use common::{all_maps, map, poset};
use kanpos::kan::{membership, Side, Subject};
use kanpos::monads::{
    algebra_structure, is_algebra_morphism, kz_check, lowerset, lowerset_on_map, monad_laws_check,
};
use kanpos::oracles::{downset_completion, free_join_semilattice, posets_up_to};
use kanpos::{samples, FinPoset, FixedBitSet, MonotoneMap};
use proptest::prelude::*;

fn preserves_joins(p: &MonotoneMap) -> bool {
    let (x, y) = (p.dom(), p.cod());
    (0..1u32 << x.len()).all(|mask| {
        let mut s = FixedBitSet::with_capacity(x.len());
        s.extend(x.elements().filter(|&i| mask >> i & 1 == 1));
        let mut image = FixedBitSet::with_capacity(y.len());
        image.extend(s.ones().map(|i| p.apply(i)));
        match (x.join(&s), y.join(&image)) {
            (Some(a), Some(b)) => p.apply(a) == b,
            _ => true,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lowerset_is_a_functor(f in map(3, 3), k in any::<usize>()) {
        let tx = lowerset(f.dom());
        let id = MonotoneMap::identity(f.dom().clone());
        prop_assert_eq!(tx.functor(&tx, &id), MonotoneMap::identity(tx.tx.clone()));
        let z = Arc::new(samples::chain(2));
        if let Some(g) = common::nth_map(f.cod(), &z, k) {
            let ty = lowerset(f.cod());
            let tz = lowerset(&z);
            let composite = tx.functor(&tz, &g.compose(&f));
            prop_assert_eq!(composite, ty.functor(&tz, &g).compose(&tx.functor(&ty, &f)));
        }
    }

    #[test]
    fn unit_is_natural(f in map(3, 3)) {
        let tx = lowerset(f.dom());
        let ty = lowerset(f.cod());
        prop_assert_eq!(ty.unit.compose(&f), tx.functor(&ty, &f).compose(&tx.unit));
        let (a, b) = (lowerset_on_map(&f), tx.functor(&ty, &f));
        prop_assert_eq!(a.images(), b.images());
    }

    #[test]
    fn laws_and_kz(x in poset(4)) {
        prop_assert!(monad_laws_check(&x).holds());
        prop_assert!(kz_check(&x));
    }

    #[test]
    fn free_join_semilattice_is_injective(x in poset(4)) {
        let (c, unit) = free_join_semilattice(&x);
        prop_assert!(unit.is_embedding());
        let h = samples::antichain_into_vee();
        prop_assert!(membership(&Subject::Object(c), std::slice::from_ref(&h), Side::Left).holds());
    }

    #[test]
    fn downset_completion_is_a_complete_lattice(x in poset(4)) {
        let (c, unit) = downset_completion(&x);
        prop_assert!(unit.is_embedding());
        prop_assert!(c.is_complete_lattice());
        prop_assert!(algebra_structure(&lowerset(&c)).is_ok());
    }
}

#[test]
fn algebra_morphisms_are_join_preserving_maps() {
    let lattices: Vec<Arc<FinPoset>> = posets_up_to(3)
        .into_iter()
        .filter(|x| algebra_structure(&lowerset(x)).is_ok())
        .collect();
    assert_eq!(lattices.len(), 3);
    for x in &lattices {
        for y in &lattices {
            let (tx, ty) = (lowerset(x), lowerset(y));
            for p in all_maps(x, y) {
                assert_eq!(
                    is_algebra_morphism(&tx, &ty, &p),
                    Some(preserves_joins(&p)),
                    "{:?}",
                    p.images()
                );
            }
        }
    }
}
