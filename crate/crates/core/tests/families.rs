use std::collections::HashSet;
use std::sync::Arc;

use causet::analysis::ordered_stems;
use causet::families::tree::Pendant;
use causet::families::{
    finite_restriction, restrict_any, Causet, CausetRef, ChainPlusPoint, CrossedChains, DisjointChains, DownTree,
    Exhaustion, Grid, Growth, Ladder, LinearSum, Oscillating, PoissonOrder, RegularForest, TreeSpec,
};
use causet::poset::ElementId;

/// Ids scanned by the brute-force oracles. Crossed chains stop early
/// because `c_i` has `2^i - 1` elements below it.
fn scan(o: &dyn Causet) -> u64 {
    let cap = if o.descriptor() == "crossed-chains" { 24 } else { 400 };
    o.size().map_or(cap, |n| n.min(cap))
}

fn families() -> Vec<CausetRef> {
    vec![
        Arc::new(Ladder),
        Arc::new(Grid),
        Arc::new(DisjointChains::new(Some(3))),
        Arc::new(DisjointChains::new(None)),
        Arc::new(ChainPlusPoint),
        Arc::new(RegularForest::new(2, vec![2, 1])),
        Arc::new(Oscillating::new(Growth::listed(vec![3, 5, 7]))),
        Arc::new(CrossedChains),
        Arc::new(DownTree::new(TreeSpec::leaves_at(&[1, 3]))),
        Arc::new(DownTree::new(TreeSpec::every_level(Pendant::chain(2)))),
        Arc::new(PoissonOrder::sample(3, 2.0, 6.0).unwrap()),
        Arc::new(LinearSum::new(vec![causet::poset::shapes::antichain(2), causet::poset::shapes::ladder(3)])),
    ]
}

/// Minimal elements of the complement among scanned ids, straight from
/// the down-sets.
fn scanned_minimal(o: &dyn Causet, stem: &[ElementId]) -> HashSet<ElementId> {
    let used: HashSet<ElementId> = stem.iter().copied().collect();
    (0..scan(o))
        .map(ElementId)
        .filter(|x| !used.contains(x) && o.down(*x).iter().all(|y| used.contains(y)))
        .collect()
}

#[test]
fn minimal_elements_agree_with_down_sets() {
    for o in families() {
        for stem in ordered_stems(o.as_ref(), 4, 300).stems {
            let m = o.minimal_after(&stem, 64);
            let listed: HashSet<ElementId> = m.elems.iter().copied().collect();
            let scanned = scanned_minimal(o.as_ref(), &stem);
            for x in &listed {
                assert!(o.down(*x).iter().all(|y| stem.contains(y)), "{}: {x:?} listed but not minimal", o.descriptor());
            }
            if m.exhaustive {
                assert_eq!(listed, scanned, "{} after {stem:?}", o.descriptor());
            }
        }
    }
}

#[test]
fn relation_agrees_with_down_sets() {
    for o in families() {
        let top = scan(o.as_ref()).min(60);
        for y in (0..top).map(ElementId) {
            let down: HashSet<ElementId> = o.down(y).into_iter().collect();
            for x in (0..top).map(ElementId) {
                assert_eq!(o.less(x, y), down.contains(&x), "{}: {x:?} < {y:?}", o.descriptor());
            }
        }
    }
}

#[test]
fn restrictions_from_covers_match_the_relation() {
    for o in families() {
        let members: Vec<ElementId> = {
            let mut seen = Vec::new();
            for stem in ordered_stems(o.as_ref(), 7, 2000).stems {
                if stem.len() == 7 {
                    seen = stem;
                    break;
                }
            }
            seen
        };
        if members.is_empty() {
            continue;
        }
        let a = causet::families::restrict_down_set(o.as_ref(), &members).unwrap();
        let b = restrict_any(o.as_ref(), &members).unwrap();
        assert_eq!(a, b, "{}", o.descriptor());
    }
}

#[test]
fn prefix_exhaustions_are_down_sets() {
    for o in families() {
        let mut prev = 0;
        for n in 1..=12 {
            let Ok(p) = finite_restriction(o.as_ref(), &Exhaustion::Prefix, n) else { break };
            assert!(p.len() >= prev);
            prev = p.len();
        }
    }
}

#[test]
fn labels_round_trip() {
    for o in families() {
        for x in (0..40).map(ElementId) {
            if o.contains(x) {
                assert_eq!(o.parse_label(&o.label(x)), Some(x), "{}", o.descriptor());
            }
        }
    }
}

#[test]
fn linear_sum_stacks_blocks() {
    let s = LinearSum::new(vec![causet::poset::shapes::antichain(2), causet::poset::shapes::chain(2)]);
    let m = s.minimal_after(&[], 8);
    assert_eq!(m.elems.len(), 2);
    let first_two: Vec<ElementId> = m.elems.clone();
    let next = s.minimal_after(&first_two, 8);
    assert_eq!(next.elems.len(), 1);
}
