use std::collections::HashMap;

use super::{numbered, triangular_root, Causet, Minimals};
use crate::poset::ElementId;

/// Disjoint union of `k` infinite chains, or countably many when `k` is
/// `None`.
///
/// With finitely many chains the enumeration is round-robin: chain `c`,
/// position `l` (both from 0) has id `l·k + c`. Countably many chains use
/// the Cantor pairing `T(c + l) + l`. Two chains are labelled `b_i`, `c_i`;
/// otherwise chain `c` position `l` is `x{c}_{l}` counting from 1.
#[derive(Clone, Copy, Debug)]
pub struct DisjointChains {
    k: Option<u64>,
}

impl DisjointChains {
    pub fn new(k: Option<u64>) -> Self {
        assert!(k != Some(0), "at least one chain");
        Self { k }
    }

    pub fn chains(&self) -> Option<u64> {
        self.k
    }

    /// `(chain, position)`, both from 0.
    pub fn locate(&self, x: ElementId) -> (u64, u64) {
        match self.k {
            Some(k) => (x.0 % k, x.0 / k),
            None => {
                let s = triangular_root(x.0);
                let l = x.0 - s * (s + 1) / 2;
                (s - l, l)
            }
        }
    }

    pub fn id(&self, chain: u64, pos: u64) -> ElementId {
        match self.k {
            Some(k) => ElementId(pos * k + chain),
            None => {
                let s = chain + pos;
                ElementId(s * (s + 1) / 2 + pos)
            }
        }
    }

    /// Per-chain number of elements used by a stem.
    pub fn heights(&self, stem: &[ElementId]) -> HashMap<u64, u64> {
        let mut h = HashMap::new();
        for &x in stem {
            *h.entry(self.locate(x).0).or_default() += 1;
        }
        h
    }
}

impl Causet for DisjointChains {
    fn descriptor(&self) -> String {
        match self.k {
            Some(k) => format!("chains({k})"),
            None => "chains(inf)".into(),
        }
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool {
        let (cx, lx) = self.locate(x);
        let (cy, ly) = self.locate(y);
        cx == cy && lx < ly
    }

    fn down(&self, x: ElementId) -> Vec<ElementId> {
        let (c, l) = self.locate(x);
        let mut v: Vec<ElementId> = (0..l).map(|i| self.id(c, i)).collect();
        v.sort_unstable();
        v
    }

    fn lower_covers(&self, x: ElementId) -> Vec<ElementId> {
        let (c, l) = self.locate(x);
        if l == 0 { vec![] } else { vec![self.id(c, l - 1)] }
    }

    fn minimal_after(&self, stem: &[ElementId], budget: usize) -> Minimals {
        let h = self.heights(stem);
        let next = |c: u64| self.id(c, h.get(&c).copied().unwrap_or(0));
        match self.k {
            Some(k) => Minimals::all((0..k).map(next).collect()),
            None => {
                // Untouched chains contribute their bottoms, whose ids grow
                // with the chain index, so the first `budget` of them plus the
                // touched chains contain the `budget` smallest answers.
                let mut out: Vec<ElementId> = h.keys().map(|&c| next(c)).collect();
                out.extend((0..).filter(|c| !h.contains_key(c)).take(budget).map(next));
                Minimals::truncated(out, budget)
            }
        }
    }

    fn label(&self, x: ElementId) -> String {
        let (c, l) = self.locate(x);
        match self.k {
            Some(1) => format!("b{}", l + 1),
            Some(2) => format!("{}{}", if c == 0 { 'b' } else { 'c' }, l + 1),
            _ => format!("x{}_{}", c + 1, l + 1),
        }
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        let (c, l) = match self.k {
            Some(1) => (0, numbered(s, "b")?),
            Some(2) => match numbered(s, "b") {
                Some(l) => (0, l),
                None => (1, numbered(s, "c")?),
            },
            _ => {
                let (c, l) = s.strip_prefix('x')?.split_once('_')?;
                (c.parse::<u64>().ok()?.checked_sub(1)?, l.parse().ok()?)
            }
        };
        if l == 0 || self.k.is_some_and(|k| c >= k) {
            return None;
        }
        Some(self.id(c, l - 1))
    }
}

/// One infinite chain `b_1 < b_2 < ...` plus an isolated element `x`.
/// `x` has id 0 and `b_i` has id `i`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ChainPlusPoint;

impl ChainPlusPoint {
    pub const POINT: ElementId = ElementId(0);
}

impl Causet for ChainPlusPoint {
    fn descriptor(&self) -> String {
        "chain-plus-point".into()
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool {
        x.0 >= 1 && x.0 < y.0
    }

    fn down(&self, x: ElementId) -> Vec<ElementId> {
        (1..x.0.max(1)).map(ElementId).collect()
    }

    fn lower_covers(&self, x: ElementId) -> Vec<ElementId> {
        if x.0 >= 2 { vec![ElementId(x.0 - 1)] } else { vec![] }
    }

    fn minimal_after(&self, stem: &[ElementId], _budget: usize) -> Minimals {
        let used = stem.iter().filter(|x| x.0 >= 1).count() as u64;
        let mut out = vec![ElementId(used + 1)];
        if !stem.contains(&Self::POINT) {
            out.push(Self::POINT);
        }
        Minimals::all(out)
    }

    fn label(&self, x: ElementId) -> String {
        if x == Self::POINT { "x".into() } else { format!("b{}", x.0) }
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        if s == "x" {
            return Some(Self::POINT);
        }
        numbered(s, "b").filter(|&i| i >= 1).map(ElementId)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::label_stem;

    #[test]
    fn two_chains_examples() {
        let c = DisjointChains::new(Some(2));
        assert_eq!(label_stem(&c, &c.minimal_after(&[], 4).elems), "b1 c1");
        let b = |s: &str| c.parse_label(s).unwrap();
        assert!(!c.less(b("b1"), b("c1")));
        assert!(c.less(b("b1"), b("b3")));
        assert_eq!(label_stem(&c, &c.down(b("b3"))), "b1 b2");
        assert_eq!(c.parse_label("d1"), None);
        assert_eq!(c.parse_label("b0"), None);
    }

    #[test]
    fn countable_chains_are_not_exhaustive() {
        let c = DisjointChains::new(None);
        let m = c.minimal_after(&[], 5);
        assert!(!m.exhaustive);
        assert_eq!(label_stem(&c, &m.elems), "x1_1 x2_1 x3_1 x4_1 x5_1");
        let x21 = c.parse_label("x2_1").unwrap();
        let m = c.minimal_after(&[x21], 3);
        assert_eq!(label_stem(&c, &m.elems), "x1_1 x3_1 x2_2");
    }

    #[test]
    fn cantor_ids_round_trip() {
        let c = DisjointChains::new(None);
        for i in 0..500 {
            let (ch, l) = c.locate(ElementId(i));
            assert_eq!(c.id(ch, l), ElementId(i));
        }
        let c3 = DisjointChains::new(Some(3));
        assert_eq!(c3.label(ElementId(4)), "x2_2");
        assert_eq!(c3.parse_label("x2_2"), Some(ElementId(4)));
        assert_eq!(c3.parse_label("x4_1"), None);
    }

    #[test]
    fn chain_plus_point() {
        let p = ChainPlusPoint;
        assert_eq!(label_stem(&p, &p.minimal_after(&[], 4).elems), "x b1");
        assert_eq!(label_stem(&p, &p.minimal_after(&[ElementId(0), ElementId(1)], 4).elems), "b2");
        assert!(!p.less(ElementId(0), ElementId(3)));
        assert!(p.less(ElementId(1), ElementId(3)));
        assert_eq!(label_stem(&p, &p.down(ElementId(3))), "b1 b2");
    }
}
