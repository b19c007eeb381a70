use std::collections::{HashMap, HashSet};

use super::{numbered, triangular_root, Causet, Minimals};
use crate::poset::ElementId;

/// The ladder: `a_1, a_2, ...` with `a_j > a_i` iff `j > i + 1`.
/// Element `a_k` has id `k - 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ladder;

impl Causet for Ladder {
    fn descriptor(&self) -> String {
        "ladder".into()
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool {
        y.0 > x.0 + 1
    }

    fn down(&self, x: ElementId) -> Vec<ElementId> {
        (0..x.0.saturating_sub(1)).map(ElementId).collect()
    }

    fn lower_covers(&self, x: ElementId) -> Vec<ElementId> {
        (x.0.saturating_sub(3)..x.0.saturating_sub(1)).map(ElementId).collect()
    }

    fn minimal_after(&self, stem: &[ElementId], _budget: usize) -> Minimals {
        let set: HashSet<u64> = stem.iter().map(|x| x.0).collect();
        let m = (0..).find(|i| !set.contains(i)).expect("stem is finite");
        let mut out = vec![ElementId(m)];
        if !set.contains(&(m + 1)) {
            out.push(ElementId(m + 1));
        }
        Minimals::all(out)
    }

    fn label(&self, x: ElementId) -> String {
        format!("a{}", x.0 + 1)
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        numbered(s, "a").filter(|&k| k >= 1).map(|k| ElementId(k - 1))
    }

    /// `shifted`: `Z_n` for odd `n`, `W_n = {a_1..a_{n-1}, a_{n+1}}` for even `n`.
    fn named_exhaustion(&self, name: &str, n: usize) -> Option<Vec<ElementId>> {
        let n = n as u64;
        match name {
            "shifted" if n % 2 == 1 => Some((0..n).map(ElementId).collect()),
            "shifted" => Some((0..n.saturating_sub(1)).chain((n > 0).then_some(n)).map(ElementId).collect()),
            _ => None,
        }
    }
}

/// The grid `N × N` with the product order. Cells are enumerated along
/// anti-diagonals: `(a, b)` has id `d(d+1)/2 + b` where `d = a + b`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Grid;

impl Grid {
    pub fn id(a: u64, b: u64) -> ElementId {
        let d = a + b;
        ElementId(d * (d + 1) / 2 + b)
    }

    pub fn coords(x: ElementId) -> (u64, u64) {
        let d = triangular_root(x.0);
        let b = x.0 - d * (d + 1) / 2;
        (d - b, b)
    }
}

impl Causet for Grid {
    fn descriptor(&self) -> String {
        "grid".into()
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool {
        let (a, b) = Self::coords(x);
        let (c, d) = Self::coords(y);
        x != y && a <= c && b <= d
    }

    fn down(&self, x: ElementId) -> Vec<ElementId> {
        let (a, b) = Self::coords(x);
        let mut v: Vec<ElementId> =
            (0..=a).flat_map(|i| (0..=b).map(move |j| Self::id(i, j))).filter(|&y| y != x).collect();
        v.sort_unstable();
        v
    }

    fn lower_covers(&self, x: ElementId) -> Vec<ElementId> {
        let (a, b) = Self::coords(x);
        let mut v = Vec::new();
        if a > 0 {
            v.push(Self::id(a - 1, b));
        }
        if b > 0 {
            v.push(Self::id(a, b - 1));
        }
        v
    }

    fn minimal_after(&self, stem: &[ElementId], _budget: usize) -> Minimals {
        // Column lengths of the Young diagram, indexed by the first coordinate.
        let mut len: HashMap<u64, u64> = HashMap::new();
        for &x in stem {
            *len.entry(Self::coords(x).0).or_default() += 1;
        }
        let top = len.keys().copied().max().map_or(0, |m| m + 1);
        let height = |a: u64| len.get(&a).copied().unwrap_or(0);
        let out = (0..=top)
            .filter(|&a| a == 0 || height(a - 1) > height(a))
            .map(|a| Self::id(a, height(a)))
            .collect();
        Minimals::all(out)
    }

    fn label(&self, x: ElementId) -> String {
        let (a, b) = Self::coords(x);
        format!("({a},{b})")
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
        let (a, b) = inner.split_once(',')?;
        Some(Self::id(a.trim().parse().ok()?, b.trim().parse().ok()?))
    }

    /// `square`: the `n × n` box.
    fn named_exhaustion(&self, name: &str, n: usize) -> Option<Vec<ElementId>> {
        let n = n as u64;
        (name == "square").then(|| (0..n).flat_map(|a| (0..n).map(move |b| Self::id(a, b))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{check_down_set, label_stem, Exhaustion};

    #[test]
    fn ladder_relation() {
        let l = Ladder;
        let a = |k| l.parse_label(&format!("a{k}")).unwrap();
        assert!(l.less(a(1), a(3)));
        assert!(!l.less(a(1), a(2)));
        assert!(!l.less(a(2), a(1)));
        assert_eq!(l.lower_covers(a(6)), vec![a(3), a(4)]);
        assert_eq!(l.lower_covers(a(2)), vec![]);
    }

    #[test]
    fn ladder_minimal_after_examples() {
        let l = Ladder;
        let m = l.minimal_after(&[ElementId(0), ElementId(1)], 8);
        assert_eq!(label_stem(&l, &m.elems), "a3 a4");
        let m = l.minimal_after(&[ElementId(0)], 8);
        assert_eq!(label_stem(&l, &m.elems), "a2 a3");
        // W_3 = {a1, a2, a4}
        let m = l.minimal_after(&[ElementId(0), ElementId(1), ElementId(3)], 8);
        assert_eq!(label_stem(&l, &m.elems), "a3");
        assert!(m.exhaustive);
    }

    #[test]
    fn ladder_shifted_exhaustion_is_increasing() {
        let sel = Exhaustion::Named("shifted".into());
        let mut prev: Vec<ElementId> = Vec::new();
        for n in 1..12 {
            let s = sel.stem(&Ladder, n).unwrap();
            assert_eq!(s.len(), n);
            assert!(prev.iter().all(|x| s.contains(x)));
            check_down_set(&Ladder, &s).unwrap();
            prev = s;
        }
    }

    #[test]
    fn grid_coordinates_round_trip() {
        for a in 0..20 {
            for b in 0..20 {
                assert_eq!(Grid::coords(Grid::id(a, b)), (a, b));
            }
        }
        assert_eq!(Grid::id(0, 0), ElementId(0));
        assert_eq!(Grid::id(1, 0), ElementId(1));
        assert_eq!(Grid::id(0, 1), ElementId(2));
    }

    #[test]
    fn grid_examples() {
        let g = Grid;
        let m = g.minimal_after(&[Grid::id(0, 0)], 8);
        assert_eq!(label_stem(&g, &m.elems), "(1,0) (0,1)");
        let d = g.down(g.parse_label("(1, 1)").unwrap());
        assert_eq!(label_stem(&g, &d), "(0,0) (1,0) (0,1)");
        assert_eq!(label_stem(&g, &g.minimal_after(&[], 8).elems), "(0,0)");
    }

    #[test]
    fn grid_minimal_after_matches_brute_force() {
        let g = Grid;
        // Diagram with columns of lengths 3, 1.
        let stem = [Grid::id(0, 0), Grid::id(0, 1), Grid::id(0, 2), Grid::id(1, 0)];
        let got = g.minimal_after(&stem, 8).elems;
        let mut want: Vec<ElementId> = (0..6)
            .flat_map(|a| (0..6).map(move |b| Grid::id(a, b)))
            .filter(|x| !stem.contains(x) && g.down(*x).iter().all(|u| stem.contains(u)))
            .collect();
        want.sort_unstable();
        assert_eq!(got, want);
    }
}
