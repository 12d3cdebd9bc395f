use std::sync::Arc;

use super::{enumerate_monotone_maps, unique_names, FinPoset, MonotoneMap};

/// The cotensor `P ⋔ X`: all monotone maps `P -> X` ordered pointwise.
#[derive(Clone, Debug)]
pub struct Cotensor {
    pub poset: Arc<FinPoset>,
    /// The map each element of `poset` stands for, by index.
    pub maps: Vec<MonotoneMap>,
}

impl Cotensor {
    /// Evaluation `(P ⋔ X) × P -> X`.
    pub fn eval(&self, element: usize, point: usize) -> usize {
        self.maps[element].apply(point)
    }

    pub fn index_of_map(&self, f: &MonotoneMap) -> Option<usize> {
        self.maps.iter().position(|g| g.images() == f.images())
    }
}

pub fn hom_poset(p: &Arc<FinPoset>, x: &Arc<FinPoset>) -> Cotensor {
    let maps: Vec<MonotoneMap> = enumerate_monotone_maps(p, x).collect();
    let names = unique_names(
        maps.iter()
            .map(|f| {
                if f.images().is_empty() {
                    "empty".to_string()
                } else {
                    f.images()
                        .iter()
                        .map(|&y| x.name(y))
                        .collect::<Vec<_>>()
                        .join("_")
                }
            })
            .collect(),
    );
    let k = maps.len();
    let up = (0..k)
        .map(|i| {
            let mut row = fixedbitset::FixedBitSet::with_capacity(k);
            for j in 0..k {
                if maps[i].pointwise_leq(&maps[j]) {
                    row.insert(j);
                }
            }
            row
        })
        .collect();
    let poset =
        Arc::new(FinPoset::from_closed(names, up).expect("pointwise order is a partial order"));
    Cotensor { poset, maps }
}
