//! Infinite causal sets behind a lazily evaluated oracle.
//!
//! Every family assigns element ids by a fixed canonical enumeration, so the
//! `i`-th enumerated element of an infinite family is `ElementId(i)`. Stems
//! passed to [`Causet::minimal_after`] are unordered sets; callers are
//! responsible for passing down-sets (see [`check_down_set`]).

mod chains;
mod crossed;
mod forest;
mod ladder;
mod linear_sum;
mod oscillating;
mod poisson;
pub mod tree;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::poset::{ElementId, FinitePoset, PosetError};

pub use chains::{ChainPlusPoint, DisjointChains};
pub use crossed::CrossedChains;
pub use forest::RegularForest;
pub use ladder::{Grid, Ladder};
pub use linear_sum::LinearSum;
pub use oscillating::{Growth, Oscillating};
pub use poisson::PoissonOrder;
pub use tree::{DownTree, TreeSpec};

/// Default number of minimal elements listed when the true answer is infinite.
pub const DEFAULT_LIST_BUDGET: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
    #[error("element {0} is not in this causal set")]
    UnknownElement(ElementId),
    #[error("not a down-set: {missing} lies below {member} but is missing")]
    NotADownSet { member: ElementId, missing: ElementId },
    #[error("not an ordered stem: element at position {position} is not minimal in what remains")]
    NotAnOrderedStem { position: usize },
    #[error("exhaustion {rule:?} is not defined for this family at n = {n}")]
    NotExhaustive { rule: String, n: usize },
    #[error("the sampled point process is empty")]
    EmptySample,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// Minimal elements of the complement of a stem.
///
/// `exhaustive` is false when the true set is infinite and only the
/// `budget` smallest ids were listed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minimals {
    pub elems: Vec<ElementId>,
    pub exhaustive: bool,
}

impl Minimals {
    pub fn all(mut elems: Vec<ElementId>) -> Self {
        elems.sort_unstable();
        Self { elems, exhaustive: true }
    }

    /// The `budget` smallest of an infinite family of candidates.
    pub fn truncated(mut elems: Vec<ElementId>, budget: usize) -> Self {
        elems.sort_unstable();
        elems.dedup();
        elems.truncate(budget);
        Self { elems, exhaustive: false }
    }
}

/// Lazily evaluated causal set.
pub trait Causet: Send + Sync {
    /// Stable textual description; equal descriptors mean the same causet.
    fn descriptor(&self) -> String;

    /// Number of elements, or `None` for a countably infinite family.
    fn size(&self) -> Option<u64> {
        None
    }

    fn contains(&self, x: ElementId) -> bool {
        self.size().is_none_or(|n| x.0 < n)
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool;

    /// D(x): the strict down-set of `x`, ascending.
    fn down(&self, x: ElementId) -> Vec<ElementId>;

    /// Lower covers of `x`.
    fn lower_covers(&self, x: ElementId) -> Vec<ElementId> {
        let d = self.down(x);
        d.iter()
            .copied()
            .filter(|&u| !d.iter().any(|&w| self.less(u, w)))
            .collect()
    }

    /// Minimal elements of the complement of the down-set `stem`. Finite
    /// answers are always complete; infinite ones are cut to `budget`.
    fn minimal_after(&self, stem: &[ElementId], budget: usize) -> Minimals;

    /// The `index`-th element of the canonical enumeration.
    fn element(&self, index: u64) -> Option<ElementId> {
        let x = ElementId(index);
        self.contains(x).then_some(x)
    }

    fn label(&self, x: ElementId) -> String;

    fn parse_label(&self, s: &str) -> Option<ElementId>;

    /// Family-specific exhaustion rules such as `square` for the grid.
    fn named_exhaustion(&self, _name: &str, _n: usize) -> Option<Vec<ElementId>> {
        None
    }
}

impl fmt::Debug for dyn Causet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Causet({})", self.descriptor())
    }
}

pub type CausetRef = Arc<dyn Causet>;

/// Parse a stem written in family labels.
pub fn parse_stem(o: &dyn Causet, labels: &[&str]) -> Result<Vec<ElementId>, FamilyError> {
    labels
        .iter()
        .map(|s| o.parse_label(s.trim()).ok_or_else(|| FamilyError::UnknownLabel(s.trim().to_string())))
        .collect()
}

pub fn label_stem(o: &dyn Causet, stem: &[ElementId]) -> String {
    stem.iter().map(|&x| o.label(x)).collect::<Vec<_>>().join(" ")
}

pub fn check_down_set(o: &dyn Causet, set: &[ElementId]) -> Result<(), FamilyError> {
    let members: HashSet<ElementId> = set.iter().copied().collect();
    for &x in set {
        if !o.contains(x) {
            return Err(FamilyError::UnknownElement(x));
        }
        if let Some(&missing) = o.down(x).iter().find(|u| !members.contains(u)) {
            return Err(FamilyError::NotADownSet { member: x, missing });
        }
    }
    Ok(())
}

/// Every element of an ordered stem is minimal among the elements not yet
/// listed. Since each prefix is then a down-set, checking lower covers
/// suffices.
pub fn check_ordered_stem(o: &dyn Causet, seq: &[ElementId]) -> Result<(), FamilyError> {
    let mut seen = HashSet::with_capacity(seq.len());
    for (position, &x) in seq.iter().enumerate() {
        if !o.contains(x) || seen.contains(&x) || !o.lower_covers(x).iter().all(|u| seen.contains(u)) {
            return Err(FamilyError::NotAnOrderedStem { position });
        }
        seen.insert(x);
    }
    Ok(())
}

/// Increasing sequence of stems whose union is the whole causet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exhaustion {
    /// Down-closure of the first `n` enumerated elements.
    Prefix,
    /// A family-specific rule.
    Named(String),
}

impl Exhaustion {
    pub fn parse(s: &str) -> Self {
        match s {
            "prefix" | "alternating" => Exhaustion::Prefix,
            other => Exhaustion::Named(other.to_string()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Exhaustion::Prefix => "prefix",
            Exhaustion::Named(s) => s,
        }
    }

    /// The `n`-th stem of the exhaustion, ascending.
    pub fn stem(&self, o: &dyn Causet, n: usize) -> Result<Vec<ElementId>, FamilyError> {
        let stall = || FamilyError::NotExhaustive { rule: self.name().to_string(), n };
        match self {
            Exhaustion::Prefix => {
                let mut set = BTreeSet::new();
                for i in 0..n as u64 {
                    let x = o.element(i).ok_or_else(stall)?;
                    if set.insert(x) {
                        set.extend(o.down(x));
                    }
                }
                Ok(set.into_iter().collect())
            }
            Exhaustion::Named(name) => {
                let mut v = o.named_exhaustion(name, n).ok_or_else(stall)?;
                v.sort_unstable();
                Ok(v)
            }
        }
    }
}

/// The restriction of `o` to a finite down-set, built from lower covers.
pub fn restrict_down_set(o: &dyn Causet, members: &[ElementId]) -> Result<FinitePoset, FamilyError> {
    let mut covers = Vec::new();
    for &x in members {
        covers.extend(o.lower_covers(x).into_iter().map(|u| (u, x)));
    }
    Ok(FinitePoset::new(members, &covers)?)
}

/// P_{Z_n} for the `n`-th stem of an exhaustion.
pub fn finite_restriction(o: &dyn Causet, sel: &Exhaustion, n: usize) -> Result<FinitePoset, FamilyError> {
    let members = sel.stem(o, n)?;
    restrict_down_set(o, &members)
}

/// The restriction to an arbitrary finite set, comparing all pairs.
pub fn restrict_any(o: &dyn Causet, members: &[ElementId]) -> Result<FinitePoset, FamilyError> {
    Ok(FinitePoset::from_relation(members, |x, y| o.less(x, y))?)
}

/// A finite poset viewed as a (finite) causet, for custom inputs.
pub struct FiniteCauset {
    poset: FinitePoset,
    name: String,
}

impl FiniteCauset {
    pub fn new(poset: FinitePoset, name: impl Into<String>) -> Self {
        Self { poset, name: name.into() }
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }
}

impl Causet for FiniteCauset {
    fn descriptor(&self) -> String {
        format!("finite({})", self.name)
    }

    fn size(&self) -> Option<u64> {
        Some(self.poset.len() as u64)
    }

    fn contains(&self, x: ElementId) -> bool {
        self.poset.contains(x)
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool {
        self.poset.contains(x) && self.poset.contains(y) && self.poset.less(x, y)
    }

    fn down(&self, x: ElementId) -> Vec<ElementId> {
        let Ok(i) = self.poset.index_of(x) else { return Vec::new() };
        self.poset.below_bits(i).ones().map(|j| self.poset.id(j)).collect()
    }

    fn lower_covers(&self, x: ElementId) -> Vec<ElementId> {
        let Ok(i) = self.poset.index_of(x) else { return Vec::new() };
        self.poset.lower_cover_idx(i).iter().map(|&j| self.poset.id(j)).collect()
    }

    fn minimal_after(&self, stem: &[ElementId], _budget: usize) -> Minimals {
        let known: Vec<ElementId> = stem.iter().copied().filter(|&x| self.poset.contains(x)).collect();
        let bits = self.poset.bits_of(&known).expect("filtered to members");
        Minimals::all(self.poset.minimal_outside(&bits).into_iter().map(|i| self.poset.id(i)).collect())
    }

    fn element(&self, index: u64) -> Option<ElementId> {
        (index < self.poset.len() as u64).then(|| self.poset.id(index as usize))
    }

    fn label(&self, x: ElementId) -> String {
        x.0.to_string()
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        let x = ElementId(s.parse().ok()?);
        self.poset.contains(x).then_some(x)
    }
}

/// P∖A for a finite down-set A.
pub struct DeleteStem {
    inner: CausetRef,
    removed: Vec<ElementId>,
    removed_set: HashSet<ElementId>,
}

/// The causet left after deleting the elements of a stem.
pub fn delete_stem(o: CausetRef, a: &[ElementId]) -> Result<CausetRef, FamilyError> {
    check_ordered_stem(o.as_ref(), a)?;
    if a.is_empty() {
        return Ok(o);
    }
    let mut removed = a.to_vec();
    removed.sort_unstable();
    let removed_set = removed.iter().copied().collect();
    Ok(Arc::new(DeleteStem { inner: o, removed, removed_set }))
}

impl DeleteStem {
    fn keep(&self, x: ElementId) -> bool {
        !self.removed_set.contains(&x)
    }
}

impl Causet for DeleteStem {
    fn descriptor(&self) -> String {
        let labels: Vec<String> = self.removed.iter().map(|&x| self.inner.label(x)).collect();
        format!("{} minus {{{}}}", self.inner.descriptor(), labels.join(","))
    }

    fn size(&self) -> Option<u64> {
        self.inner.size().map(|n| n - self.removed.len() as u64)
    }

    fn contains(&self, x: ElementId) -> bool {
        self.keep(x) && self.inner.contains(x)
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool {
        self.keep(x) && self.keep(y) && self.inner.less(x, y)
    }

    fn down(&self, x: ElementId) -> Vec<ElementId> {
        self.inner.down(x).into_iter().filter(|&u| self.keep(u)).collect()
    }

    fn lower_covers(&self, x: ElementId) -> Vec<ElementId> {
        // Removed elements form a down-set, so covers among the rest are
        // covers of the original order.
        self.inner.lower_covers(x).into_iter().filter(|&u| self.keep(u)).collect()
    }

    fn minimal_after(&self, stem: &[ElementId], budget: usize) -> Minimals {
        let mut all = self.removed.clone();
        all.extend(stem.iter().copied().filter(|&x| self.keep(x)));
        self.inner.minimal_after(&all, budget)
    }

    fn element(&self, index: u64) -> Option<ElementId> {
        let mut seen = 0u64;
        let mut j = 0u64;
        loop {
            let x = self.inner.element(j)?;
            if self.keep(x) {
                if seen == index {
                    return Some(x);
                }
                seen += 1;
            }
            j += 1;
        }
    }

    fn label(&self, x: ElementId) -> String {
        self.inner.label(x)
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        self.inner.parse_label(s).filter(|&x| self.keep(x))
    }
}

/// Parse `prefix` followed by a decimal number.
pub(crate) fn numbered(s: &str, prefix: &str) -> Option<u64> {
    let rest = s.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

/// Largest `d` with `d(d+1)/2 <= id`.
pub(crate) fn triangular_root(id: u64) -> u64 {
    let mut d = ((8.0 * id as f64 + 1.0).sqrt() as u64).saturating_sub(1) / 2;
    while (d + 1) * (d + 2) / 2 <= id {
        d += 1;
    }
    while d * (d + 1) / 2 > id {
        d -= 1;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::shapes;

    fn ids(v: &[u64]) -> Vec<ElementId> {
        v.iter().map(|&i| ElementId(i)).collect()
    }

    #[test]
    fn triangular_root_inverts() {
        for d in 0..200u64 {
            let t = d * (d + 1) / 2;
            assert_eq!(triangular_root(t), d);
            assert_eq!(triangular_root(t + d), d);
        }
    }

    #[test]
    fn ladder_prefix_restriction_is_finite_ladder() {
        let p = finite_restriction(&Ladder, &Exhaustion::Prefix, 5).unwrap();
        assert_eq!(p, shapes::ladder(5));
    }

    #[test]
    fn grid_square_restriction() {
        let g = Grid;
        let p = finite_restriction(&g, &Exhaustion::Named("square".into()), 2).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.count_linear_extensions().unwrap(), 2u32.into());
    }

    #[test]
    fn alternating_chains_restriction() {
        let c = DisjointChains::new(Some(2));
        let members = Exhaustion::parse("alternating").stem(&c, 4).unwrap();
        let labels: Vec<String> = members.iter().map(|&x| c.label(x)).collect();
        assert_eq!(labels, ["b1", "c1", "b2", "c2"]);
    }

    #[test]
    fn unknown_rule_stalls() {
        let r = Exhaustion::Named("square".into()).stem(&Ladder, 3);
        assert!(matches!(r, Err(FamilyError::NotExhaustive { .. })));
    }

    #[test]
    fn delete_stem_from_ladder() {
        let o: CausetRef = Arc::new(Ladder);
        let a1 = o.parse_label("a1").unwrap();
        let d = delete_stem(o.clone(), &[a1]).unwrap();
        let m = d.minimal_after(&[], 8);
        assert_eq!(label_stem(d.as_ref(), &m.elems), "a2 a3");
        assert_eq!(d.element(0), Some(ElementId(1)));
    }

    #[test]
    fn delete_empty_stem_is_identity() {
        let o: CausetRef = Arc::new(Ladder);
        let d = delete_stem(o.clone(), &[]).unwrap();
        assert!(Arc::ptr_eq(&o, &d));
    }

    #[test]
    fn delete_rejects_non_stem() {
        let o: CausetRef = Arc::new(Ladder);
        assert!(delete_stem(o, &ids(&[2])).is_err());
    }

    #[test]
    fn finite_wrapper_round_trip() {
        let f = FiniteCauset::new(shapes::grid(2, 2), "g");
        let m = f.minimal_after(&ids(&[0]), 8);
        assert_eq!(m.elems, ids(&[1, 2]));
        assert_eq!(f.parse_label("3"), Some(ElementId(3)));
        assert_eq!(f.parse_label("4"), None);
        assert_eq!(f.lower_covers(ElementId(3)), ids(&[1, 2]));
    }

    #[test]
    fn check_ordered_stem_positions() {
        assert!(check_ordered_stem(&Ladder, &ids(&[1, 0, 2])).is_ok());
        assert_eq!(
            check_ordered_stem(&Ladder, &ids(&[0, 3])),
            Err(FamilyError::NotAnOrderedStem { position: 1 })
        );
        assert!(check_down_set(&Ladder, &ids(&[2])).is_err());
    }
}
