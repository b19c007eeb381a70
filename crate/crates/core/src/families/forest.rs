use std::collections::HashSet;

use super::{Causet, Minimals};
use crate::poset::ElementId;

/// Deepest level represented; nodes below it are outside the causet.
pub const MAX_DEPTH: usize = 1 << 16;

/// Upward-branching forest with `roots` trees in which every node at depth
/// `d` has `branching[d % len]` children.
///
/// Nodes are numbered breadth-first; within a level, the children of node
/// `i` are `i·b, ..., i·b + b - 1`. A node is labelled by its path, e.g.
/// `t0.1.1` is the second child of the second child of root 0.
#[derive(Clone, Debug)]
pub struct RegularForest {
    roots: u64,
    branching: Vec<u64>,
    /// Id of the first node at each depth, while it fits in a `u64` and the
    /// depth is at most [`MAX_DEPTH`].
    offsets: Vec<u64>,
}

impl RegularForest {
    pub fn new(roots: u64, branching: Vec<u64>) -> Self {
        assert!(roots >= 1 && !branching.is_empty(), "forest needs roots and a branching pattern");
        let mut offsets = vec![0u64];
        let mut width = roots;
        while offsets.len() <= MAX_DEPTH {
            let last = *offsets.last().expect("nonempty");
            let Some(next) = last.checked_add(width) else { break };
            offsets.push(next);
            let b = branching[(offsets.len() - 2) % branching.len()];
            match width.checked_mul(b) {
                Some(w) if w > 0 => width = w,
                _ => break,
            }
        }
        Self { roots, branching, offsets }
    }

    pub fn single_chain() -> Self {
        Self::new(1, vec![1])
    }

    pub fn binary_tree() -> Self {
        Self::new(1, vec![2])
    }

    pub fn roots(&self) -> u64 {
        self.roots
    }

    pub fn branching_at(&self, depth: usize) -> u64 {
        self.branching[depth % self.branching.len()]
    }

    /// `(depth, index within level)`.
    pub fn locate(&self, x: ElementId) -> (usize, u64) {
        let d = self.offsets.partition_point(|&o| o <= x.0) - 1;
        (d, x.0 - self.offsets[d])
    }

    fn id(&self, depth: usize, index: u64) -> Option<ElementId> {
        let base = *self.offsets.get(depth)?;
        let end = *self.offsets.get(depth + 1)?;
        let id = base.checked_add(index)?;
        (id < end).then_some(ElementId(id))
    }

    pub fn parent(&self, x: ElementId) -> Option<ElementId> {
        let (d, i) = self.locate(x);
        (d > 0).then(|| self.id(d - 1, i / self.branching_at(d - 1)).expect("parent exists"))
    }

    pub fn children(&self, x: ElementId) -> Vec<ElementId> {
        let (d, i) = self.locate(x);
        let b = self.branching_at(d);
        (0..b).filter_map(|j| self.id(d + 1, i * b + j)).collect()
    }

    /// Path of child positions from the root, root index first.
    pub fn path(&self, x: ElementId) -> Vec<u64> {
        let mut path = Vec::new();
        let mut cur = x;
        loop {
            let (d, i) = self.locate(cur);
            if d == 0 {
                path.push(i);
                break;
            }
            path.push(i % self.branching_at(d - 1));
            cur = self.parent(cur).expect("non-root");
        }
        path.reverse();
        path
    }

    pub fn depth(&self, x: ElementId) -> usize {
        self.locate(x).0
    }
}

impl Causet for RegularForest {
    fn descriptor(&self) -> String {
        let b: Vec<String> = self.branching.iter().map(u64::to_string).collect();
        format!("forest({};{})", self.roots, b.join(","))
    }

    fn contains(&self, x: ElementId) -> bool {
        x.0 < *self.offsets.last().expect("nonempty")
    }

    fn size(&self) -> Option<u64> {
        self.branching.contains(&0).then(|| *self.offsets.last().expect("nonempty"))
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool {
        let dx = self.depth(x);
        let mut cur = y;
        while self.depth(cur) > dx {
            cur = self.parent(cur).expect("non-root");
        }
        cur == x && x != y
    }

    fn down(&self, x: ElementId) -> Vec<ElementId> {
        let mut v = Vec::new();
        let mut cur = x;
        while let Some(p) = self.parent(cur) {
            v.push(p);
            cur = p;
        }
        v.reverse();
        v
    }

    fn lower_covers(&self, x: ElementId) -> Vec<ElementId> {
        self.parent(x).into_iter().collect()
    }

    fn minimal_after(&self, stem: &[ElementId], _budget: usize) -> Minimals {
        let set: HashSet<ElementId> = stem.iter().copied().collect();
        let mut out: Vec<ElementId> =
            (0..self.roots).map(ElementId).filter(|r| !set.contains(r)).collect();
        for &x in stem {
            out.extend(self.children(x).into_iter().filter(|c| !set.contains(c)));
        }
        Minimals::all(out)
    }

    fn label(&self, x: ElementId) -> String {
        let parts: Vec<String> = self.path(x).iter().map(u64::to_string).collect();
        format!("t{}", parts.join("."))
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        let mut parts = s.strip_prefix('t')?.split('.');
        let root: u64 = parts.next()?.parse().ok()?;
        if root >= self.roots {
            return None;
        }
        let (mut depth, mut index) = (0usize, root);
        for p in parts {
            let j: u64 = p.parse().ok()?;
            let b = self.branching_at(depth);
            if j >= b {
                return None;
            }
            index = index.checked_mul(b)?.checked_add(j)?;
            depth += 1;
        }
        self.id(depth, index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::label_stem;

    #[test]
    fn single_chain_has_one_minimum() {
        let f = RegularForest::single_chain();
        assert_eq!(f.minimal_after(&[], 4).elems, vec![ElementId(0)]);
        assert!(f.less(ElementId(0), ElementId(5)));
    }

    #[test]
    fn binary_tree_children() {
        let f = RegularForest::binary_tree();
        let m = f.minimal_after(&[ElementId(0)], 4);
        assert_eq!(label_stem(&f, &m.elems), "t0.0 t0.1");
        let x = f.parse_label("t0.1.0").unwrap();
        assert_eq!(x, ElementId(5));
        assert_eq!(f.label(x), "t0.1.0");
        assert_eq!(label_stem(&f, &f.down(x)), "t0 t0.1");
    }

    #[test]
    fn down_sets_are_chains() {
        let f = RegularForest::new(2, vec![3, 1]);
        for i in 0..200 {
            let d = f.down(ElementId(i));
            for w in d.windows(2) {
                assert!(f.less(w[0], w[1]));
            }
            assert_eq!(f.lower_covers(ElementId(i)).len(), usize::from(f.depth(ElementId(i)) > 0));
        }
    }

    #[test]
    fn ids_stay_in_range() {
        let f = RegularForest::binary_tree();
        assert!(f.size().is_none());
        assert!(f.contains(ElementId(1 << 40)));
    }
}
