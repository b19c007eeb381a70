//! Down-set lattice dynamic programming.
//!
//! A down-set is keyed by its frontier: the antichain of its maximal
//! elements. For narrow posets the frontier has at most `width` entries, so
//! keys stay small even when the poset has thousands of elements. The walk is
//! layered by down-set size; e(P, A) is the number of ways to grow A into the
//! whole poset one minimal element at a time.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{FinitePoset, PosetError};
use crate::exact::ratio_of;

/// Default cap on the number of down-set states visited by one call.
pub const DEFAULT_STATE_BUDGET: usize = 10_000_000;

type Frontier = Box<[u32]>;

#[derive(Clone)]
struct Node {
    members: FixedBitSet,
    /// Minimal elements of the complement, ascending.
    minimal: Vec<usize>,
}

fn frontier_of(p: &FinitePoset, members: &FixedBitSet) -> Frontier {
    members
        .ones()
        .filter(|&i| p.above_bits(i).is_disjoint(members))
        .map(|i| i as u32)
        .collect()
}

fn grow_frontier(p: &FinitePoset, frontier: &[u32], b: usize) -> Frontier {
    let below = p.below_bits(b);
    let mut out: Vec<u32> = frontier.iter().copied().filter(|&f| !below.contains(f as usize)).collect();
    let pos = out.partition_point(|&f| (f as usize) < b);
    out.insert(pos, b as u32);
    out.into_boxed_slice()
}

fn grow_node(p: &FinitePoset, node: &Node, b: usize) -> Node {
    let mut members = node.members.clone();
    members.insert(b);
    let mut minimal: Vec<usize> = node.minimal.iter().copied().filter(|&m| m != b).collect();
    for &y in p.upper_cover_idx(b) {
        if p.lower_cover_idx(y).iter().all(|&z| members.contains(z)) {
            minimal.push(y);
        }
    }
    minimal.sort_unstable();
    Node { members, minimal }
}

fn start_node(p: &FinitePoset, members: FixedBitSet) -> (Frontier, Node) {
    let minimal = p.minimal_outside(&members);
    (frontier_of(p, &members), Node { members, minimal })
}

/// Number of ways to extend the down-set `start` to a linear extension.
pub(super) fn forward_count(p: &FinitePoset, start: FixedBitSet, budget: usize) -> Result<BigUint, PosetError> {
    let n = p.len();
    let remaining = n - start.count_ones(..);
    let (key, node) = start_node(p, start);
    let mut level: HashMap<Frontier, (Node, BigUint)> = HashMap::new();
    level.insert(key, (node, BigUint::one()));
    let mut visited = 1usize;
    for _ in 0..remaining {
        let mut next: HashMap<Frontier, (Node, BigUint)> = HashMap::with_capacity(level.len() * 2);
        for (frontier, (node, count)) in &level {
            for &b in &node.minimal {
                let key = grow_frontier(p, frontier, b);
                match next.get_mut(&key) {
                    Some((_, c)) => *c += count,
                    None => {
                        visited += 1;
                        if visited > budget {
                            return Err(PosetError::ResourceLimit { budget });
                        }
                        next.insert(key, (grow_node(p, node, b), count.clone()));
                    }
                }
            }
        }
        level = next;
    }
    Ok(level.into_values().map(|(_, c)| c).sum())
}

struct TableEntry {
    node: Node,
    /// Linear extensions of the down-set itself (paths from the empty set).
    below: BigUint,
    /// Ways to complete the down-set to a linear extension of the poset.
    above: BigUint,
}

/// The full down-set lattice of a finite poset with, for every down-set
/// `A`, both `e(P_A)` and `e(P \ A)`.
///
/// Building it costs one pass up and one pass down; afterwards prefix counts,
/// exact uniform sampling and rank distributions are table lookups.
pub struct ExtensionTable {
    levels: Vec<HashMap<Frontier, TableEntry>>,
}

impl ExtensionTable {
    pub fn build(p: &FinitePoset, budget: usize) -> Result<Self, PosetError> {
        let n = p.len();
        let (key, node) = start_node(p, FixedBitSet::with_capacity(n));
        let mut levels: Vec<HashMap<Frontier, TableEntry>> = Vec::with_capacity(n + 1);
        let mut first = HashMap::new();
        first.insert(key, TableEntry { node, below: BigUint::one(), above: BigUint::zero() });
        levels.push(first);
        let mut visited = 1usize;
        for k in 0..n {
            let mut next: HashMap<Frontier, TableEntry> = HashMap::new();
            for (frontier, entry) in &levels[k] {
                for &b in &entry.node.minimal {
                    let key = grow_frontier(p, frontier, b);
                    match next.get_mut(&key) {
                        Some(e) => e.below += &entry.below,
                        None => {
                            visited += 1;
                            if visited > budget {
                                return Err(PosetError::ResourceLimit { budget });
                            }
                            next.insert(
                                key,
                                TableEntry {
                                    node: grow_node(p, &entry.node, b),
                                    below: entry.below.clone(),
                                    above: BigUint::zero(),
                                },
                            );
                        }
                    }
                }
            }
            levels.push(next);
        }
        for e in levels[n].values_mut() {
            e.above = BigUint::one();
        }
        for k in (0..n).rev() {
            let (lo, hi) = levels.split_at_mut(k + 1);
            let upper = &hi[0];
            for (frontier, entry) in lo[k].iter_mut() {
                let mut acc = BigUint::zero();
                for &b in &entry.node.minimal {
                    acc += &upper[&grow_frontier(p, frontier, b)].above;
                }
                entry.above = acc;
            }
        }
        Ok(Self { levels })
    }

    /// Total number of down-sets.
    pub fn states(&self) -> usize {
        self.levels.iter().map(HashMap::len).sum()
    }

    pub fn total(&self) -> &BigUint {
        &self.levels[0].values().next().expect("root").above
    }

    fn entry(&self, p: &FinitePoset, members: &FixedBitSet) -> &TableEntry {
        let k = members.count_ones(..);
        &self.levels[k][&frontier_of(p, members)]
    }

    /// e(P \ A) for a down-set given by its member bits.
    pub(crate) fn completions(&self, p: &FinitePoset, members: &FixedBitSet) -> &BigUint {
        &self.entry(p, members).above
    }

    /// Walk from the empty down-set choosing each next element with weight
    /// equal to its completion count; `pick(total, weights)` returns the chosen
    /// position.
    pub(crate) fn walk(
        &self,
        p: &FinitePoset,
        mut pick: impl FnMut(&BigUint, &[&BigUint]) -> usize,
    ) -> Vec<usize> {
        let n = p.len();
        let mut frontier: Frontier = Box::new([]);
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let entry = &self.levels[k][&frontier];
            let nexts: Vec<(usize, Frontier)> =
                entry.node.minimal.iter().map(|&b| (b, grow_frontier(p, &frontier, b))).collect();
            let weights: Vec<&BigUint> = nexts.iter().map(|(_, f)| &self.levels[k + 1][f].above).collect();
            let i = pick(&entry.above, &weights);
            let (b, f) = nexts[i].clone();
            frontier = f;
            out.push(b);
        }
        out
    }

    /// r_i(x), i = 1..n, for the element with index `x`.
    pub(crate) fn rank_distribution(&self, p: &FinitePoset, x: usize) -> Vec<BigRational> {
        let n = self.levels.len() - 1;
        let total = self.total().clone();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = BigUint::zero();
            for (frontier, entry) in &self.levels[k] {
                if entry.node.minimal.contains(&x) {
                    let next = &self.levels[k + 1][&grow_frontier(p, frontier, x)];
                    acc += &entry.below * &next.above;
                }
            }
            out.push(ratio_of(&acc, &total));
        }
        out
    }
}
