//! Finite posets and exact linear-extension combinatorics.
//!
//! Everything here is exact: counts are big integers and probabilities are
//! rationals. The counting engine walks the lattice of down-sets level by
//! level; see [`count`].

mod count;
mod enumerate;
mod sample;

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use count::{ExtensionTable, DEFAULT_STATE_BUDGET};
pub use enumerate::enumerate_extensions;
pub use sample::{sample_uniform_extension, UniformSampler};

use crate::exact::ratio_of;

/// Opaque element label.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u64);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for ElementId {
    fn from(v: u64) -> Self {
        ElementId(v)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("cover relation has a cycle through element {0}")]
    CycleDetected(ElementId),
    #[error("unknown element {0}")]
    UnknownElement(ElementId),
    #[error("element {0} declared twice")]
    DuplicateElement(ElementId),
    #[error("set is not a down-set: {missing} lies below {member} but is missing")]
    NotADownSet { member: ElementId, missing: ElementId },
    #[error("not an ordered stem: element at position {position} is not minimal in what remains")]
    NotAnOrderedStem { position: usize },
    #[error("down-set lattice exceeded the state budget of {budget}")]
    ResourceLimit { budget: usize },
    #[error("more than {cap} linear extensions")]
    CapExceeded { cap: usize },
}

/// Finite strict partial order, stored as a reduced cover relation plus its
/// full transitive closure.
///
/// Elements are kept sorted by id, so index order is id order.
#[derive(Clone)]
pub struct FinitePoset {
    ids: Vec<ElementId>,
    index: HashMap<ElementId, usize>,
    below: Vec<FixedBitSet>,
    above: Vec<FixedBitSet>,
    lower_covers: Vec<Vec<usize>>,
    upper_covers: Vec<Vec<usize>>,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinitePoset")
            .field("elements", &self.ids)
            .field("covers", &self.covers())
            .finish()
    }
}

impl PartialEq for FinitePoset {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.covers() == other.covers()
    }
}

impl FinitePoset {
    /// Build from declared elements and a cover list. Redundant covers are
    /// reduced away; cycles are rejected.
    pub fn new(elements: &[ElementId], covers: &[(ElementId, ElementId)]) -> Result<Self, PosetError> {
        let (ids, index) = index_elements(elements)?;
        let n = ids.len();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(lo, hi) in covers {
            let l = *index.get(&lo).ok_or(PosetError::UnknownElement(lo))?;
            let h = *index.get(&hi).ok_or(PosetError::UnknownElement(hi))?;
            if l == h {
                return Err(PosetError::CycleDetected(lo));
            }
            preds[h].push(l);
            succs[l].push(h);
        }
        // Kahn's algorithm; anything left over sits on a cycle.
        let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = queue.pop() {
            topo.push(v);
            for &w in &succs[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&i| indeg[i] > 0).expect("cycle member");
            return Err(PosetError::CycleDetected(ids[stuck]));
        }
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for &v in &topo {
            let mut acc = FixedBitSet::with_capacity(n);
            for &u in &preds[v] {
                acc.insert(u);
                acc.union_with(&below[u]);
            }
            below[v] = acc;
        }
        Ok(Self::from_closure(ids, index, below))
    }

    /// Build from an oracle for the strict order. The relation must already be
    /// transitive and irreflexive; a violation of antisymmetry is reported as
    /// a cycle.
    pub fn from_relation(
        elements: &[ElementId],
        less: impl Fn(ElementId, ElementId) -> bool,
    ) -> Result<Self, PosetError> {
        let (ids, index) = index_elements(elements)?;
        let n = ids.len();
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for (j, &y) in ids.iter().enumerate() {
            for (i, &x) in ids.iter().enumerate() {
                if i != j && less(x, y) {
                    below[j].insert(i);
                }
            }
        }
        for i in 0..n {
            if below[i].contains(i) || below[i].ones().any(|j| below[j].contains(i)) {
                return Err(PosetError::CycleDetected(ids[i]));
            }
        }
        Ok(Self::from_closure(ids, index, below))
    }

    fn from_closure(ids: Vec<ElementId>, index: HashMap<ElementId, usize>, below: Vec<FixedBitSet>) -> Self {
        let n = ids.len();
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for (j, b) in below.iter().enumerate() {
            for i in b.ones() {
                above[i].insert(j);
            }
        }
        let mut lower_covers = vec![Vec::new(); n];
        let mut upper_covers = vec![Vec::new(); n];
        for v in 0..n {
            let mut implied = FixedBitSet::with_capacity(n);
            for w in below[v].ones() {
                implied.union_with(&below[w]);
            }
            for u in below[v].difference(&implied) {
                lower_covers[v].push(u);
                upper_covers[u].push(v);
            }
        }
        for c in &mut upper_covers {
            c.sort_unstable();
        }
        Self { ids, index, below, above, lower_covers, upper_covers }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn elements(&self) -> &[ElementId] {
        &self.ids
    }

    pub fn contains(&self, x: ElementId) -> bool {
        self.index.contains_key(&x)
    }

    pub fn index_of(&self, x: ElementId) -> Result<usize, PosetError> {
        self.index.get(&x).copied().ok_or(PosetError::UnknownElement(x))
    }

    pub fn id(&self, i: usize) -> ElementId {
        self.ids[i]
    }

    /// Strict order `x < y`. Unknown elements compare false.
    pub fn less(&self, x: ElementId, y: ElementId) -> bool {
        match (self.index.get(&x), self.index.get(&y)) {
            (Some(&i), Some(&j)) => self.below[j].contains(i),
            _ => false,
        }
    }

    pub fn comparable(&self, x: ElementId, y: ElementId) -> bool {
        self.less(x, y) || self.less(y, x)
    }

    /// Reduced cover pairs `(lower, upper)`, sorted.
    pub fn covers(&self) -> Vec<(ElementId, ElementId)> {
        let mut out: Vec<_> = self
            .lower_covers
            .iter()
            .enumerate()
            .flat_map(|(v, us)| us.iter().map(move |&u| (u, v)))
            .map(|(u, v)| (self.ids[u], self.ids[v]))
            .collect();
        out.sort_unstable();
        out
    }

    pub(crate) fn below_bits(&self, i: usize) -> &FixedBitSet {
        &self.below[i]
    }

    pub(crate) fn above_bits(&self, i: usize) -> &FixedBitSet {
        &self.above[i]
    }

    pub(crate) fn lower_cover_idx(&self, i: usize) -> &[usize] {
        &self.lower_covers[i]
    }

    pub(crate) fn upper_cover_idx(&self, i: usize) -> &[usize] {
        &self.upper_covers[i]
    }

    pub fn is_maximal(&self, x: ElementId) -> Result<bool, PosetError> {
        Ok(self.above[self.index_of(x)?].is_clear())
    }

    pub fn is_minimal(&self, x: ElementId) -> Result<bool, PosetError> {
        Ok(self.below[self.index_of(x)?].is_clear())
    }

    /// Size of the largest antichain (Dilworth, via bipartite matching on
    /// the strict order).
    pub fn width(&self) -> usize {
        let n = self.len();
        let mut match_right: Vec<Option<usize>> = vec![None; n];
        fn augment(
            u: usize,
            p: &FinitePoset,
            seen: &mut FixedBitSet,
            match_right: &mut [Option<usize>],
        ) -> bool {
            for v in p.above[u].ones() {
                if seen.put(v) {
                    continue;
                }
                if match_right[v].is_none_or(|w| augment(w, p, seen, match_right)) {
                    match_right[v] = Some(u);
                    return true;
                }
            }
            false
        }
        let mut matched = 0;
        for u in 0..n {
            let mut seen = FixedBitSet::with_capacity(n);
            if augment(u, self, &mut seen, &mut match_right) {
                matched += 1;
            }
        }
        n - matched
    }

    pub(crate) fn bits_of(&self, set: &[ElementId]) -> Result<FixedBitSet, PosetError> {
        let mut bits = FixedBitSet::with_capacity(self.len());
        for &x in set {
            bits.insert(self.index_of(x)?);
        }
        Ok(bits)
    }

    /// Validate a down-set and return its canonical form.
    pub fn down_set(&self, members: &[ElementId]) -> Result<DownSet, PosetError> {
        let bits = self.bits_of(members)?;
        self.check_down_closed(&bits)?;
        Ok(DownSet::from_sorted(bits.ones().map(|i| self.ids[i]).collect()))
    }

    fn check_down_closed(&self, bits: &FixedBitSet) -> Result<(), PosetError> {
        for i in bits.ones() {
            if let Some(j) = self.below[i].difference(bits).next() {
                return Err(PosetError::NotADownSet { member: self.ids[i], missing: self.ids[j] });
            }
        }
        Ok(())
    }

    /// Check that `seq` is an ordered stem and return its member bits.
    pub(crate) fn stem_bits(&self, seq: &[ElementId]) -> Result<FixedBitSet, PosetError> {
        let mut bits = FixedBitSet::with_capacity(self.len());
        for (pos, &x) in seq.iter().enumerate() {
            let i = self.index.get(&x).copied().ok_or(PosetError::UnknownElement(x))?;
            if bits.contains(i) || !self.below[i].is_subset(&bits) {
                return Err(PosetError::NotAnOrderedStem { position: pos });
            }
            bits.insert(i);
        }
        Ok(bits)
    }

    pub fn is_ordered_stem(&self, seq: &[ElementId]) -> bool {
        self.stem_bits(seq).is_ok()
    }

    /// Minimal elements of the complement of a down-set, in id order.
    pub fn minimal_after(&self, a: &DownSet) -> Result<Vec<ElementId>, PosetError> {
        let bits = self.bits_of(a.members())?;
        self.check_down_closed(&bits)?;
        Ok(self.minimal_outside(&bits).into_iter().map(|i| self.ids[i]).collect())
    }

    pub(crate) fn minimal_outside(&self, bits: &FixedBitSet) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| !bits.contains(i) && self.below[i].is_subset(bits))
            .collect()
    }

    /// Restriction to a subset of elements.
    pub fn restrict(&self, keep: &[ElementId]) -> Result<FinitePoset, PosetError> {
        let (ids, index) = index_elements(keep)?;
        let orig: Vec<usize> = ids.iter().map(|&x| self.index_of(x)).collect::<Result<_, _>>()?;
        let n = ids.len();
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for (a, &ia) in orig.iter().enumerate() {
            for (b, &ib) in orig.iter().enumerate() {
                if self.below[ia].contains(ib) {
                    below[a].insert(b);
                }
            }
        }
        Ok(Self::from_closure(ids, index, below))
    }

    /// The poset with a set of elements removed.
    pub fn without(&self, removed: &[ElementId]) -> Result<FinitePoset, PosetError> {
        let bits = self.bits_of(removed)?;
        let keep: Vec<ElementId> =
            (0..self.len()).filter(|&i| !bits.contains(i)).map(|i| self.ids[i]).collect();
        self.restrict(&keep)
    }

    /// e(P), with the default state budget.
    pub fn count_linear_extensions(&self) -> Result<BigUint, PosetError> {
        self.count_linear_extensions_with_budget(DEFAULT_STATE_BUDGET)
    }

    pub fn count_linear_extensions_with_budget(&self, budget: usize) -> Result<BigUint, PosetError> {
        count::forward_count(self, FixedBitSet::with_capacity(self.len()), budget)
    }

    /// Number of linear extensions that begin with the ordered stem `s`.
    pub fn count_with_prefix(&self, s: &[ElementId]) -> Result<BigUint, PosetError> {
        self.count_with_prefix_budget(s, DEFAULT_STATE_BUDGET)
    }

    pub fn count_with_prefix_budget(&self, s: &[ElementId], budget: usize) -> Result<BigUint, PosetError> {
        let bits = self.stem_bits(s)?;
        count::forward_count(self, bits, budget)
    }

    /// ν^P(E(s)): the uniform probability that a linear extension starts with `s`.
    pub fn nu_uniform(&self, s: &[ElementId]) -> Result<BigRational, PosetError> {
        let num = self.count_with_prefix(s)?;
        let den = self.count_linear_extensions()?;
        Ok(ratio_of(&num, &den))
    }

    /// `r_i(x)` for `i = 1..=n`: the probability that `x` sits at position
    /// `i` of a uniformly random linear extension.
    pub fn rank_distribution(&self, x: ElementId) -> Result<Vec<BigRational>, PosetError> {
        let table = ExtensionTable::build(self, DEFAULT_STATE_BUDGET)?;
        let i = self.index_of(x)?;
        Ok(table.rank_distribution(self, i))
    }
}

fn index_elements(elements: &[ElementId]) -> Result<(Vec<ElementId>, HashMap<ElementId, usize>), PosetError> {
    let mut ids = elements.to_vec();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(PosetError::DuplicateElement(w[0]));
    }
    let index = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    Ok((ids, index))
}

/// A down-set in canonical (sorted) form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DownSet {
    members: Vec<ElementId>,
}

impl DownSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub(crate) fn from_sorted(members: Vec<ElementId>) -> Self {
        Self { members }
    }

    /// Canonicalize without checking closure; checked wherever a poset is at hand.
    pub fn from_members(members: impl IntoIterator<Item = ElementId>) -> Self {
        let mut m: Vec<_> = members.into_iter().collect();
        m.sort_unstable();
        m.dedup();
        Self { members: m }
    }

    pub fn members(&self) -> &[ElementId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: ElementId) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

/// Common small posets used throughout tests and presets.
pub mod shapes {
    use super::{ElementId, FinitePoset};

    fn ids(n: u64) -> Vec<ElementId> {
        (0..n).map(ElementId).collect()
    }

    pub fn chain(n: u64) -> FinitePoset {
        let covers: Vec<_> = (1..n).map(|i| (ElementId(i - 1), ElementId(i))).collect();
        FinitePoset::new(&ids(n), &covers).expect("chain is acyclic")
    }

    pub fn antichain(n: u64) -> FinitePoset {
        FinitePoset::new(&ids(n), &[]).expect("antichain")
    }

    /// The finite ladder P_n: element `a_{i+1}` has id `i`, and `a_j > a_i`
    /// iff `j > i + 1`.
    pub fn ladder(n: u64) -> FinitePoset {
        let covers: Vec<_> = (0..n).flat_map(|i| (i + 2..n).map(move |j| (ElementId(i), ElementId(j)))).collect();
        FinitePoset::new(&ids(n), &covers).expect("ladder is acyclic")
    }

    /// Rectangular grid `rows × cols`; cell `(r, c)` has id `r * cols + c`.
    pub fn grid(rows: u64, cols: u64) -> FinitePoset {
        let mut covers = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let id = r * cols + c;
                if r + 1 < rows {
                    covers.push((ElementId(id), ElementId(id + cols)));
                }
                if c + 1 < cols {
                    covers.push((ElementId(id), ElementId(id + 1)));
                }
            }
        }
        FinitePoset::new(&ids(rows * cols), &covers).expect("grid is acyclic")
    }
}
