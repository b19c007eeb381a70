use std::collections::{BTreeSet, HashSet};

use crate::families::{Causet, DEFAULT_LIST_BUDGET};
use crate::poset::ElementId;

/// Stems visited per check unless configured otherwise.
pub const DEFAULT_STEM_BUDGET: usize = 100_000;

#[derive(Clone, Debug, Default)]
pub struct StemWalk {
    pub stems: Vec<Vec<ElementId>>,
    /// The stem budget ran out before the walk finished.
    pub capped: bool,
    /// Some minimal-element list was truncated, so stems were skipped.
    pub truncated_lists: bool,
}

/// Ordered stems of length at most `depth`, depth-first, starting with the
/// empty stem.
pub fn ordered_stems(o: &dyn Causet, depth: usize, budget: usize) -> StemWalk {
    let mut walk = StemWalk::default();
    let mut stack = vec![Vec::new()];
    while let Some(stem) = stack.pop() {
        if walk.stems.len() >= budget {
            walk.capped = true;
            break;
        }
        if stem.len() < depth {
            let m = o.minimal_after(&stem, DEFAULT_LIST_BUDGET);
            walk.truncated_lists |= !m.exhaustive;
            for &x in m.elems.iter().rev() {
                let mut next = stem.clone();
                next.push(x);
                stack.push(next);
            }
        }
        walk.stems.push(stem);
    }
    walk
}

/// Down-sets of size `1..=size`, each represented by the ordering in which
/// it was first reached, smaller sizes first.
pub fn down_sets(o: &dyn Causet, size: usize, budget: usize) -> StemWalk {
    let mut walk = StemWalk::default();
    let mut layer: Vec<Vec<ElementId>> = vec![Vec::new()];
    for _ in 0..size {
        let mut seen: HashSet<BTreeSet<ElementId>> = HashSet::new();
        let mut next_layer = Vec::new();
        for stem in &layer {
            let m = o.minimal_after(stem, DEFAULT_LIST_BUDGET);
            walk.truncated_lists |= !m.exhaustive;
            for &x in &m.elems {
                let mut next = stem.clone();
                next.push(x);
                if seen.insert(next.iter().copied().collect()) {
                    if walk.stems.len() + next_layer.len() >= budget {
                        walk.capped = true;
                        walk.stems.extend(next_layer);
                        return walk;
                    }
                    next_layer.push(next);
                }
            }
        }
        walk.stems.extend(next_layer.iter().cloned());
        layer = next_layer;
    }
    walk
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{DisjointChains, Grid, Ladder};

    #[test]
    fn ladder_ordered_stems() {
        let w = ordered_stems(&Ladder, 3, 1000);
        // 1 + 2 + 3 + 5 ordered stems of lengths 0..3.
        assert_eq!(w.stems.len(), 11);
        assert!(!w.capped && !w.truncated_lists);
    }

    #[test]
    fn two_chain_down_sets() {
        let w = down_sets(&DisjointChains::new(Some(2)), 3, 1000);
        let sizes: Vec<usize> = (1..=3).map(|k| w.stems.iter().filter(|s| s.len() == k).count()).collect();
        assert_eq!(sizes, [2, 3, 4]);
    }

    #[test]
    fn grid_down_sets_are_partitions() {
        let w = down_sets(&Grid, 4, 1000);
        assert_eq!(w.stems.iter().filter(|s| s.len() == 4).count(), 5);
    }

    #[test]
    fn budget_caps_walk() {
        let w = ordered_stems(&Grid, 6, 10);
        assert!(w.capped);
        assert_eq!(w.stems.len(), 10);
    }

    #[test]
    fn countable_chains_flag_truncation() {
        let w = ordered_stems(&DisjointChains::new(None), 1, 1000);
        assert!(w.truncated_lists);
    }
}
