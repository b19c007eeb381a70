//! Downward-branching trees: a reference chain `x_0 < x_1 < ...` with a
//! finite forest `A_i` hanging below each `x_i`, `i >= 1`.
//!
//! Ids list `x_i` followed by the elements of `A_i`, level by level, so
//! `id(x_i) = i + a_1 + ... + a_{i-1}` where `a_j = |A_j|`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use super::{numbered, Causet, FamilyError, Minimals};
use crate::poset::{ElementId, FinitePoset};

/// A finite downward forest. `parents[e]` is the upper cover of `e` inside
/// the forest, or `None` when `e` is covered by the chain element directly.
/// Parents have larger indices than their children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pendant {
    parents: Vec<Option<usize>>,
}

impl Pendant {
    pub fn new(parents: Vec<Option<usize>>) -> Result<Self, FamilyError> {
        for (e, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                if p <= e || p >= parents.len() {
                    return Err(FamilyError::InvalidParameter(format!(
                        "pendant element {e} has parent {p}; parents must come later in the list"
                    )));
                }
            }
        }
        Ok(Self { parents })
    }

    pub fn leaf() -> Self {
        Self { parents: vec![None] }
    }

    /// A chain of `k` elements hanging from its top.
    pub fn chain(k: usize) -> Self {
        Self { parents: (0..k).map(|e| (e + 1 < k).then_some(e + 1)).collect() }
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn parent(&self, e: usize) -> Option<usize> {
        self.parents[e]
    }

    pub fn children(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        (0..e).filter(move |&c| self.parents[c] == Some(e))
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&e| self.parents[e].is_none())
    }

    /// Everything strictly below `e`.
    pub fn below(&self, e: usize) -> Vec<usize> {
        (0..e).filter(|&c| self.is_below(c, e)).collect()
    }

    pub fn is_below(&self, c: usize, e: usize) -> bool {
        let mut cur = self.parents[c];
        while let Some(p) = cur {
            if p == e {
                return true;
            }
            cur = self.parents[p];
        }
        false
    }

    /// The forest as a finite poset with ids `0..len`.
    pub fn poset(&self) -> FinitePoset {
        let ids: Vec<ElementId> = (0..self.len() as u64).map(ElementId).collect();
        let covers: Vec<_> = self
            .parents
            .iter()
            .enumerate()
            .filter_map(|(e, p)| p.map(|p| (ElementId(e as u64), ElementId(p as u64))))
            .collect();
        FinitePoset::new(&ids, &covers).expect("parents point upward")
    }
}

impl fmt::Display for Pendant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Pendant::leaf() {
            return write!(f, "leaf");
        }
        if *self == Pendant::chain(self.len()) {
            return write!(f, "chain:{}", self.len());
        }
        let parts: Vec<String> = self.parents.iter().map(|p| p.map_or("-".into(), |p| p.to_string())).collect();
        write!(f, "parents:{}", parts.join(","))
    }
}

/// What is known about `sum_{i > J} t_i` for a tree.
#[derive(Clone)]
pub enum TailBound {
    /// Only finitely many `A_i` are nonempty.
    FiniteSupport,
    /// `bound(J) >= sum_{i > J} t_i`, tending to 0.
    Bound(Arc<dyn Fn(u64) -> f64 + Send + Sync>),
    /// The series is known to diverge.
    Divergent,
}

impl fmt::Debug for TailBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailBound::FiniteSupport => write!(f, "FiniteSupport"),
            TailBound::Bound(_) => write!(f, "Bound"),
            TailBound::Divergent => write!(f, "Divergent"),
        }
    }
}

/// Which pendant hangs at which level.
pub trait PendantRule: Send + Sync {
    fn name(&self) -> String;

    /// The pendant at level `i >= 1`, or `None` when `A_i` is empty.
    fn pendant(&self, level: u64) -> Option<&Pendant>;

    /// Smallest level `> after` with a nonempty pendant.
    fn next_nonempty(&self, after: u64) -> Option<u64>;

    /// `a_1 + ... + a_level`.
    fn size_upto(&self, level: u64) -> u64;

    /// Analytic information on the tail of `sum t_i`; `None` when unknown.
    fn tail(&self) -> Option<TailBound> {
        None
    }
}

/// Pendants at finitely many listed levels.
struct Listed {
    levels: BTreeMap<u64, Pendant>,
}

impl PendantRule for Listed {
    fn name(&self) -> String {
        let parts: Vec<String> = self
            .levels
            .iter()
            .map(|(i, p)| format!("{i}:{p}"))
            .collect();
        format!("listed[{}]", parts.join(" "))
    }

    fn pendant(&self, level: u64) -> Option<&Pendant> {
        self.levels.get(&level)
    }

    fn next_nonempty(&self, after: u64) -> Option<u64> {
        self.levels.range(after + 1..).next().map(|(&i, _)| i)
    }

    fn size_upto(&self, level: u64) -> u64 {
        self.levels.range(..=level).map(|(_, p)| p.len() as u64).sum()
    }

    fn tail(&self) -> Option<TailBound> {
        Some(TailBound::FiniteSupport)
    }
}

/// The same pendant at every level `i >= 1`.
struct EveryLevel {
    pendant: Pendant,
}

impl PendantRule for EveryLevel {
    fn name(&self) -> String {
        format!("every[{}]", self.pendant)
    }

    fn pendant(&self, level: u64) -> Option<&Pendant> {
        (level >= 1).then_some(&self.pendant)
    }

    fn next_nonempty(&self, after: u64) -> Option<u64> {
        Some(after + 1)
    }

    fn size_upto(&self, level: u64) -> u64 {
        level * self.pendant.len() as u64
    }

    fn tail(&self) -> Option<TailBound> {
        // t_i = a / ((a + 1) i): a harmonic series.
        Some(TailBound::Divergent)
    }
}

/// The same pendant at levels `1, 2, 4, 8, ...`.
struct PowersOfTwo {
    pendant: Pendant,
}

impl PendantRule for PowersOfTwo {
    fn name(&self) -> String {
        format!("powers-of-two[{}]", self.pendant)
    }

    fn pendant(&self, level: u64) -> Option<&Pendant> {
        level.is_power_of_two().then_some(&self.pendant)
    }

    fn next_nonempty(&self, after: u64) -> Option<u64> {
        (after + 1).checked_next_power_of_two()
    }

    fn size_upto(&self, level: u64) -> u64 {
        let count = if level == 0 { 0 } else { 64 - level.leading_zeros() as u64 };
        count * self.pendant.len() as u64
    }

    fn tail(&self) -> Option<TailBound> {
        // t_i <= a / i, and the levels above J are powers of two >= J + 1.
        let a = self.pendant.len() as f64;
        Some(TailBound::Bound(Arc::new(move |j| 2.0 * a / (j as f64 + 1.0))))
    }
}

/// A tree described by its pendant rule.
#[derive(Clone)]
pub struct TreeSpec {
    rule: Arc<dyn PendantRule>,
}

impl fmt::Debug for TreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeSpec({})", self.rule.name())
    }
}

impl TreeSpec {
    pub fn with_rule(rule: Arc<dyn PendantRule>) -> Self {
        Self { rule }
    }

    pub fn listed(levels: BTreeMap<u64, Pendant>) -> Self {
        let levels = levels.into_iter().filter(|(i, p)| *i >= 1 && !p.is_empty()).collect();
        Self::with_rule(Arc::new(Listed { levels }))
    }

    pub fn bare_chain() -> Self {
        Self::listed(BTreeMap::new())
    }

    /// A single leaf at each listed level.
    pub fn leaves_at(levels: &[u64]) -> Self {
        Self::listed(levels.iter().map(|&i| (i, Pendant::leaf())).collect())
    }

    pub fn every_level(pendant: Pendant) -> Self {
        Self::with_rule(Arc::new(EveryLevel { pendant }))
    }

    pub fn powers_of_two(pendant: Pendant) -> Self {
        Self::with_rule(Arc::new(PowersOfTwo { pendant }))
    }

    pub fn rule(&self) -> &dyn PendantRule {
        self.rule.as_ref()
    }

    pub fn name(&self) -> String {
        self.rule.name()
    }
}

/// Position of an element in the tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    /// `x_i`.
    Chain(u64),
    /// Element `e` of the pendant `A_i`.
    Pendant(u64, usize),
}

/// The tree of a [`TreeSpec`] as a causet.
#[derive(Clone, Debug)]
pub struct DownTree {
    spec: TreeSpec,
}

impl DownTree {
    pub fn new(spec: TreeSpec) -> Self {
        Self { spec }
    }

    pub fn spec(&self) -> &TreeSpec {
        &self.spec
    }

    pub fn a(&self, level: u64) -> u64 {
        self.spec.rule.pendant(level).map_or(0, |p| p.len() as u64)
    }

    /// `a_1 + ... + a_level`.
    pub fn size_upto(&self, level: u64) -> u64 {
        self.spec.rule.size_upto(level)
    }

    pub fn chain_id(&self, i: u64) -> ElementId {
        ElementId(i + if i == 0 { 0 } else { self.size_upto(i - 1) })
    }

    pub fn pendant_id(&self, i: u64, e: usize) -> ElementId {
        ElementId(self.chain_id(i).0 + 1 + e as u64)
    }

    pub fn locate(&self, x: ElementId) -> Node {
        // Largest i with chain_id(i) <= x; chain_id(i) >= i bounds the search.
        let (mut lo, mut hi) = (0u64, x.0);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if self.chain_id(mid).0 <= x.0 {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let base = self.chain_id(lo).0;
        if base == x.0 { Node::Chain(lo) } else { Node::Pendant(lo, (x.0 - base - 1) as usize) }
    }

    pub fn id_of(&self, node: Node) -> ElementId {
        match node {
            Node::Chain(i) => self.chain_id(i),
            Node::Pendant(i, e) => self.pendant_id(i, e),
        }
    }

    pub fn pendant(&self, level: u64) -> Option<&Pendant> {
        self.spec.rule.pendant(level)
    }

    /// `|D(x_i)| = i + a_1 + ... + a_i`.
    pub fn chain_down_size(&self, i: u64) -> u64 {
        i + self.size_upto(i)
    }

    fn pendant_minima(&self, level: u64, stem: &HashSet<usize>) -> Vec<ElementId> {
        let Some(p) = self.pendant(level) else { return Vec::new() };
        (0..p.len())
            .filter(|e| !stem.contains(e) && p.children(*e).all(|c| stem.contains(&c)))
            .map(|e| self.pendant_id(level, e))
            .collect()
    }
}

impl Causet for DownTree {
    fn descriptor(&self) -> String {
        format!("tree({})", self.spec.name())
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool {
        match (self.locate(x), self.locate(y)) {
            (Node::Chain(i), Node::Chain(j)) => i < j,
            (Node::Chain(_), Node::Pendant(..)) => false,
            (Node::Pendant(i, _), Node::Chain(j)) => i <= j,
            (Node::Pendant(i, e), Node::Pendant(j, f)) => {
                i == j && self.pendant(i).is_some_and(|p| p.is_below(e, f))
            }
        }
    }

    fn down(&self, x: ElementId) -> Vec<ElementId> {
        match self.locate(x) {
            Node::Chain(i) => {
                let mut v: Vec<ElementId> = (0..x.0).map(ElementId).collect();
                v.extend((0..self.a(i) as usize).map(|e| self.pendant_id(i, e)));
                v
            }
            Node::Pendant(i, e) => {
                let p = self.pendant(i).expect("element exists");
                p.below(e).into_iter().map(|c| self.pendant_id(i, c)).collect()
            }
        }
    }

    fn lower_covers(&self, x: ElementId) -> Vec<ElementId> {
        match self.locate(x) {
            Node::Chain(0) => vec![],
            Node::Chain(i) => {
                let mut v = vec![self.chain_id(i - 1)];
                if let Some(p) = self.pendant(i) {
                    v.extend(p.roots().map(|e| self.pendant_id(i, e)));
                }
                v
            }
            Node::Pendant(i, e) => {
                let p = self.pendant(i).expect("element exists");
                p.children(e).map(|c| self.pendant_id(i, c)).collect()
            }
        }
    }

    fn minimal_after(&self, stem: &[ElementId], budget: usize) -> Minimals {
        let mut chain_used = 0u64;
        let mut touched: HashMap<u64, HashSet<usize>> = HashMap::new();
        for &x in stem {
            match self.locate(x) {
                Node::Chain(_) => chain_used += 1,
                Node::Pendant(i, e) => {
                    touched.entry(i).or_default().insert(e);
                }
            }
        }
        let m = chain_used;
        let empty = HashSet::new();
        let mut out = Vec::new();
        let pendant_full = |i: u64| touched.get(&i).map_or(0, |s| s.len() as u64) == self.a(i);
        if pendant_full(m) {
            out.push(self.chain_id(m));
        }
        let last_touched = touched.keys().copied().max().unwrap_or(0).max(m);
        let mut level = 0u64;
        while let Some(i) = self.spec.rule.next_nonempty(level) {
            if i > last_touched && out.len() >= budget {
                out.sort_unstable();
                out.truncate(budget);
                return Minimals { elems: out, exhaustive: false };
            }
            out.extend(self.pendant_minima(i, touched.get(&i).unwrap_or(&empty)));
            level = i;
        }
        Minimals::all(out)
    }

    fn label(&self, x: ElementId) -> String {
        match self.locate(x) {
            Node::Chain(i) => format!("x{i}"),
            Node::Pendant(i, _) if self.a(i) == 1 => format!("y{i}"),
            Node::Pendant(i, e) => format!("y{i}_{}", e + 1),
        }
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        if let Some(i) = numbered(s, "x") {
            return Some(self.chain_id(i));
        }
        let rest = s.strip_prefix('y')?;
        let (i, e) = match rest.split_once('_') {
            Some((i, e)) => (i.parse::<u64>().ok()?, e.parse::<usize>().ok()?.checked_sub(1)?),
            None => (rest.parse::<u64>().ok()?, 0),
        };
        (i >= 1 && (e as u64) < self.a(i)).then(|| self.pendant_id(i, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{label_stem, restrict_any, restrict_down_set, Exhaustion};

    #[test]
    fn bare_chain_has_one_minimum() {
        let t = DownTree::new(TreeSpec::bare_chain());
        let m = t.minimal_after(&[], 4);
        assert!(m.exhaustive);
        assert_eq!(label_stem(&t, &m.elems), "x0");
        assert!(t.less(t.chain_id(0), t.chain_id(3)));
    }

    #[test]
    fn pendant_at_first_level() {
        let t = DownTree::new(TreeSpec::leaves_at(&[1]));
        assert_eq!(label_stem(&t, &t.minimal_after(&[], 4).elems), "x0 y1");
        let y1 = t.parse_label("y1").unwrap();
        assert_eq!(t.label(y1), "y1");
        assert!(t.less(y1, t.chain_id(1)));
        assert!(!t.less(t.chain_id(0), y1));
    }

    #[test]
    fn ids_follow_chain_then_pendant() {
        let t = DownTree::new(TreeSpec::leaves_at(&[1, 2]));
        let labels: Vec<String> = (0..6).map(|i| t.label(ElementId(i))).collect();
        assert_eq!(labels, ["x0", "x1", "y1", "x2", "y2", "x3"]);
        for i in 0..40 {
            assert_eq!(t.id_of(t.locate(ElementId(i))), ElementId(i));
        }
    }

    #[test]
    fn pendant_levels_for_powers_of_two() {
        let t = DownTree::new(TreeSpec::powers_of_two(Pendant::leaf()));
        assert_eq!(t.a(4), 1);
        assert_eq!(t.a(6), 0);
        assert_eq!(t.size_upto(8), 4);
        let m = t.minimal_after(&[], 3);
        assert!(!m.exhaustive);
        assert_eq!(label_stem(&t, &m.elems), "x0 y1 y2");
    }

    #[test]
    fn every_two_elements_have_an_upper_bound() {
        let spec = TreeSpec::listed(BTreeMap::from([
            (1, Pendant::chain(2)),
            (3, Pendant::new(vec![Some(2), Some(2), None]).unwrap()),
        ]));
        let t = DownTree::new(spec);
        let members = Exhaustion::Prefix.stem(&t, 12).unwrap();
        let p = restrict_down_set(&t, &members).unwrap();
        assert_eq!(p, restrict_any(&t, &members).unwrap());
        let top = t.chain_id(6);
        for &x in &members {
            assert!(x == top || t.less(x, top) || !members.contains(&top));
        }
        for &x in p.elements() {
            assert!(t.lower_covers(x).len() <= 3);
        }
    }

    #[test]
    fn pendant_minima_after_partial_stem() {
        let spec = TreeSpec::listed(BTreeMap::from([(1, Pendant::chain(2))]));
        let t = DownTree::new(spec);
        assert_eq!(label_stem(&t, &t.minimal_after(&[], 8).elems), "x0 y1_1");
        let y11 = t.parse_label("y1_1").unwrap();
        let x0 = t.chain_id(0);
        assert_eq!(label_stem(&t, &t.minimal_after(&[x0, y11], 8).elems), "y1_2");
    }

    #[test]
    fn pendant_validation() {
        assert!(Pendant::new(vec![Some(0)]).is_err());
        assert_eq!(Pendant::chain(3).below(2), vec![0, 1]);
    }
}
