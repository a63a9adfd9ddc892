//! Hitting sets (transversals) of set families.

use crate::bits::{Antichain, TupleSet};

/// All subset-minimal transversals of `family`, by Berge's incremental
/// algorithm. The empty family has the single transversal `∅`; a family
/// containing `∅` has none.
pub fn minimal_transversals(family: &[TupleSet]) -> Vec<TupleSet> {
    let mut current = Antichain::unit();
    let mut edges: Vec<&TupleSet> = family.iter().collect();
    edges.sort();
    for edge in edges {
        let mut next = Antichain::new();
        for t in current.sets() {
            if t.intersects(edge) {
                next.insert(t.clone());
            }
        }
        for t in current.sets() {
            if !t.intersects(edge) {
                for e in edge.iter() {
                    next.insert(t.with(e));
                }
            }
        }
        current = next;
        if current.is_empty() {
            break;
        }
    }
    current.into_sorted()
}

/// Size of a smallest transversal of `family` that uses no element of
/// `forbidden`, or `None` when some member lies inside `forbidden`.
pub fn minimum_transversal_size(family: &[TupleSet], forbidden: &TupleSet) -> Option<usize> {
    let allowed: Vec<TupleSet> = family.iter().map(|s| s.difference(forbidden)).collect();
    if allowed.iter().any(TupleSet::is_empty) {
        return None;
    }
    let mut best = allowed.len();
    branch(&allowed, &TupleSet::empty(), 0, &mut best);
    Some(best)
}

fn branch(family: &[TupleSet], chosen: &TupleSet, size: usize, best: &mut usize) {
    let open: Vec<&TupleSet> = family.iter().filter(|s| !s.intersects(chosen)).collect();
    let Some(pivot) = open.iter().min_by_key(|s| s.len()) else {
        *best = (*best).min(size);
        return;
    };
    if size + lower_bound(&open) >= *best {
        return;
    }
    for e in pivot.iter() {
        branch(family, &chosen.with(e), size + 1, best);
    }
}

/// Number of pairwise disjoint open sets, found greedily.
fn lower_bound(open: &[&TupleSet]) -> usize {
    let mut sorted: Vec<&TupleSet> = open.to_vec();
    sorted.sort_by_key(|s| s.len());
    let mut used = TupleSet::empty();
    let mut count = 0;
    for s in sorted {
        if !s.intersects(&used) {
            used = used.union(s);
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sets(xs: &[&[usize]]) -> Vec<TupleSet> {
        xs.iter().map(|s| TupleSet::from_indices(s.iter().copied())).collect()
    }

    fn is_transversal(t: &TupleSet, family: &[TupleSet]) -> bool {
        family.iter().all(|s| s.intersects(t))
    }

    #[test]
    fn two_disjoint_pairs() {
        let family = sets(&[&[0, 1], &[2, 3]]);
        assert_eq!(
            minimal_transversals(&family),
            sets(&[&[0, 2], &[0, 3], &[1, 2], &[1, 3]])
        );
        assert_eq!(minimum_transversal_size(&family, &TupleSet::empty()), Some(2));
        assert_eq!(minimum_transversal_size(&family, &TupleSet::from_indices([0, 1])), None);
    }

    #[test]
    fn degenerate_families() {
        assert_eq!(minimal_transversals(&[]), vec![TupleSet::empty()]);
        assert!(minimal_transversals(&[TupleSet::empty()]).is_empty());
        assert_eq!(minimum_transversal_size(&[], &TupleSet::empty()), Some(0));
    }

    proptest! {
        #[test]
        fn berge_matches_enumeration(raw in proptest::collection::vec(
            proptest::collection::btree_set(0usize..7, 1..4), 0..5)) {
            let family: Vec<TupleSet> = raw.iter().map(|s| TupleSet::from_indices(s.iter().copied())).collect();
            let mut expected = Vec::new();
            for mask in 0u32..128 {
                let t = TupleSet::from_indices((0..7).filter(|i| mask & (1 << i) != 0));
                let minimal = is_transversal(&t, &family)
                    && t.iter().all(|e| !is_transversal(&t.without(e), &family));
                if minimal {
                    expected.push(t);
                }
            }
            expected.sort();
            let min_size = expected.iter().map(TupleSet::len).min();
            prop_assert_eq!(minimal_transversals(&family), expected);
            prop_assert_eq!(minimum_transversal_size(&family, &TupleSet::empty()), min_size);
        }
    }
}
