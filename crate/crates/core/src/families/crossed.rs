use super::{numbered, Causet, Minimals};
use crate::poset::ElementId;

/// Two chains `b_1 < b_2 < ...` and `c_0 < c_1 < ...` with the extra
/// relations `c_i > b_j` whenever `j < 2^i`.
///
/// Ids interleave the chains: `b_j` is `2(j-1)` and `c_i` is `2i + 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CrossedChains;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strand {
    /// `b_j`, `j >= 1`.
    B(u64),
    /// `c_i`, `i >= 0`.
    C(u64),
}

impl CrossedChains {
    pub fn strand(x: ElementId) -> Strand {
        if x.0.is_multiple_of(2) { Strand::B(x.0 / 2 + 1) } else { Strand::C(x.0 / 2) }
    }

    pub fn b(j: u64) -> ElementId {
        assert!(j >= 1);
        ElementId(2 * (j - 1))
    }

    pub fn c(i: u64) -> ElementId {
        ElementId(2 * i + 1)
    }

    /// Number of `b`s below `c_i`, i.e. `2^i - 1`, saturating.
    fn b_below(i: u64) -> u64 {
        1u64.checked_shl(i as u32).map_or(u64::MAX, |p| p - 1)
    }
}

impl Causet for CrossedChains {
    fn descriptor(&self) -> String {
        "crossed-chains".into()
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool {
        match (Self::strand(x), Self::strand(y)) {
            (Strand::B(j), Strand::B(k)) => j < k,
            (Strand::C(i), Strand::C(k)) => i < k,
            (Strand::B(j), Strand::C(i)) => j <= Self::b_below(i),
            (Strand::C(_), Strand::B(_)) => false,
        }
    }

    fn down(&self, x: ElementId) -> Vec<ElementId> {
        let mut v: Vec<ElementId> = match Self::strand(x) {
            Strand::B(j) => (1..j).map(Self::b).collect(),
            Strand::C(i) => (0..i).map(Self::c).chain((1..=Self::b_below(i)).map(Self::b)).collect(),
        };
        v.sort_unstable();
        v
    }

    fn lower_covers(&self, x: ElementId) -> Vec<ElementId> {
        match Self::strand(x) {
            Strand::B(1) => vec![],
            Strand::B(j) => vec![Self::b(j - 1)],
            Strand::C(0) => vec![],
            Strand::C(i) => {
                // b_{2^i - 1} is a cover unless it already lies below c_{i-1}.
                let top = Self::b_below(i);
                let mut v = vec![Self::c(i - 1)];
                if top > Self::b_below(i - 1) {
                    v.push(Self::b(top));
                }
                v
            }
        }
    }

    fn minimal_after(&self, stem: &[ElementId], _budget: usize) -> Minimals {
        let bs = stem.iter().filter(|&&x| matches!(Self::strand(x), Strand::B(_))).count() as u64;
        let cs = stem.len() as u64 - bs;
        let mut out = vec![Self::b(bs + 1)];
        if bs >= Self::b_below(cs) {
            out.push(Self::c(cs));
        }
        Minimals::all(out)
    }

    fn label(&self, x: ElementId) -> String {
        match Self::strand(x) {
            Strand::B(j) => format!("b{j}"),
            Strand::C(i) => format!("c{i}"),
        }
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        if let Some(j) = numbered(s, "b") {
            return (j >= 1).then(|| Self::b(j));
        }
        numbered(s, "c").map(Self::c)
    }
}
