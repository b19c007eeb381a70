use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::{numbered, Causet, Minimals};
use crate::poset::ElementId;

/// Chain lengths `m_n` for `n >= 3`.
#[derive(Clone)]
pub struct Growth {
    name: String,
    rule: Arc<dyn Fn(u32) -> Option<u64> + Send + Sync>,
}

impl Growth {
    /// `m_n = 2^(2^n)`, cut off once it no longer fits in 64 bits.
    pub fn double_exponential() -> Self {
        Self {
            name: "2^2^n".into(),
            rule: Arc::new(|n| 1u64.checked_shl(1u32.checked_shl(n)?).filter(|&m| m > 0)),
        }
    }

    /// `m_n = first · ratio^(n-3)`.
    pub fn geometric(first: u64, ratio: u64) -> Self {
        Self {
            name: format!("{first}*{ratio}^(n-3)"),
            rule: Arc::new(move |n| first.checked_mul(ratio.checked_pow(n - 3)?)),
        }
    }

    /// `m_3, m_4, ...` listed explicitly; the causet stops after the list.
    pub fn listed(values: Vec<u64>) -> Self {
        let name = values.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        Self { name, rule: Arc::new(move |n| values.get(n as usize - 3).copied()) }
    }

    pub fn len_of(&self, n: u32) -> Option<u64> {
        (self.rule)(n)
    }
}

impl fmt::Debug for Growth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Growth({})", self.name)
    }
}

/// `P_1 = {a}`, `P_2 = {a, b}`, and `P_n` adds a chain `C_n` of `m_n`
/// elements above all of `Z_{n-2}`, incomparable with `Z_{n-1} \ Z_{n-2}`.
///
/// Blocks are numbered from 1 (`a` is block 1, `b` block 2, `C_n` block `n`),
/// and `x < y` iff they share a block with `x` lower, or `block(x) <=
/// block(y) - 2`. Ids run block by block. Blocks whose ids would overflow
/// 64 bits are left out, so the causet may be finite in practice.
#[derive(Clone, Debug)]
pub struct Oscillating {
    growth: Growth,
    /// `offsets[n - 1]` is the first id of block `n`; the last entry is the end.
    offsets: Vec<u64>,
}

impl Oscillating {
    pub fn new(growth: Growth) -> Self {
        let mut offsets = vec![0u64, 1, 2];
        for n in 3u32.. {
            let Some(m) = growth.len_of(n).filter(|&m| m > 0) else { break };
            let Some(end) = offsets.last().expect("nonempty").checked_add(m) else { break };
            offsets.push(end);
        }
        Self { growth, offsets }
    }

    pub fn growth(&self) -> &Growth {
        &self.growth
    }

    /// Number of blocks present.
    pub fn blocks(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn block_len(&self, n: usize) -> u64 {
        self.offsets[n] - self.offsets[n - 1]
    }

    /// `|Z_n|`.
    pub fn level_size(&self, n: usize) -> Option<u64> {
        self.offsets.get(n).copied()
    }

    /// `(block from 1, position from 0)`.
    pub fn locate(&self, x: ElementId) -> (usize, u64) {
        let n = self.offsets.partition_point(|&o| o <= x.0);
        (n, x.0 - self.offsets[n - 1])
    }

    fn id(&self, block: usize, pos: u64) -> ElementId {
        ElementId(self.offsets[block - 1] + pos)
    }

    fn last_of(&self, block: usize) -> ElementId {
        ElementId(self.offsets[block] - 1)
    }
}

impl Causet for Oscillating {
    fn descriptor(&self) -> String {
        format!("oscillating({})", self.growth.name)
    }

    fn size(&self) -> Option<u64> {
        self.offsets.last().copied()
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool {
        let (i, p) = self.locate(x);
        let (j, q) = self.locate(y);
        (i == j && p < q) || i + 2 <= j
    }

    fn down(&self, x: ElementId) -> Vec<ElementId> {
        let (j, q) = self.locate(x);
        let below = if j >= 3 { self.offsets[j - 2] } else { 0 };
        (0..below).chain(self.offsets[j - 1]..self.offsets[j - 1] + q).map(ElementId).collect()
    }

    fn lower_covers(&self, x: ElementId) -> Vec<ElementId> {
        let (j, q) = self.locate(x);
        if q > 0 {
            return vec![self.id(j, q - 1)];
        }
        // Blocks j-2 and j-3 are incomparable, so both tops are covers.
        (j.saturating_sub(3).max(1)..j.saturating_sub(1)).map(|b| self.last_of(b)).collect()
    }

    fn minimal_after(&self, stem: &[ElementId], _budget: usize) -> Minimals {
        let mut used: HashMap<usize, u64> = HashMap::new();
        for &x in stem {
            *used.entry(self.locate(x).0).or_default() += 1;
        }
        let taken = |b: usize| used.get(&b).copied().unwrap_or(0);
        let blocks = self.blocks();
        let Some(first) = (1..=blocks).find(|&b| taken(b) < self.block_len(b)) else {
            return Minimals::all(vec![]);
        };
        let out = (first..=(first + 1).min(blocks))
            .filter(|&b| taken(b) < self.block_len(b))
            .map(|b| self.id(b, taken(b)))
            .collect();
        Minimals::all(out)
    }

    fn label(&self, x: ElementId) -> String {
        match self.locate(x) {
            (1, _) => "a".into(),
            (2, _) => "b".into(),
            (n, p) => format!("c{n}_{}", p + 1),
        }
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        match s {
            "a" => Some(ElementId(0)),
            "b" => Some(ElementId(1)),
            _ => {
                let (n, p) = s.split_once('_')?;
                let n = numbered(n, "c")? as usize;
                let p: u64 = p.parse().ok()?;
                (n >= 3 && n <= self.blocks() && p >= 1 && p <= self.block_len(n)).then(|| self.id(n, p - 1))
            }
        }
    }

    /// `levels`: `Z_n`, the union of the first `n` blocks.
    fn named_exhaustion(&self, name: &str, n: usize) -> Option<Vec<ElementId>> {
        if name != "levels" || n == 0 {
            return None;
        }
        let end = self.level_size(n)?;
        Some((0..end).map(ElementId).collect())
    }
}
