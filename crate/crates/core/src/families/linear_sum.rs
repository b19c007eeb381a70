use super::{Causet, Minimals};
use crate::poset::{ElementId, FinitePoset};

/// Linear sum `P_1 < P_2 < ...` of finite summands, repeating the given list
/// periodically. Summand `k` (from 1), local element `j` (from 1, in the
/// summand's id order) is labelled `z{k}_{j}`.
#[derive(Clone, Debug)]
pub struct LinearSum {
    summands: Vec<FinitePoset>,
    /// Cumulative sizes within one period.
    starts: Vec<u64>,
    period: u64,
}

impl LinearSum {
    pub fn new(summands: Vec<FinitePoset>) -> Self {
        assert!(!summands.is_empty() && summands.iter().all(|p| !p.is_empty()), "nonempty summands");
        let mut starts = Vec::with_capacity(summands.len());
        let mut acc = 0u64;
        for p in &summands {
            starts.push(acc);
            acc += p.len() as u64;
        }
        Self { summands, starts, period: acc }
    }

    /// The summand with index `k` (from 0).
    pub fn summand(&self, k: u64) -> &FinitePoset {
        &self.summands[(k % self.summands.len() as u64) as usize]
    }

    fn offset(&self, k: u64) -> u64 {
        let r = self.summands.len() as u64;
        (k / r) * self.period + self.starts[(k % r) as usize]
    }

    /// `(summand from 0, local index)`.
    pub fn locate(&self, x: ElementId) -> (u64, usize) {
        let r = self.summands.len() as u64;
        let cycle = x.0 / self.period;
        let rem = x.0 % self.period;
        let i = self.starts.partition_point(|&s| s <= rem) - 1;
        (cycle * r + i as u64, (rem - self.starts[i]) as usize)
    }

    pub fn id(&self, k: u64, local: usize) -> ElementId {
        ElementId(self.offset(k) + local as u64)
    }

    /// Index of the first summand not fully contained in the down-set.
    pub fn current_summand(&self, stem: &[ElementId]) -> u64 {
        let mut k = 0;
        let mut rest = stem.len() as u64;
        while rest >= self.summand(k).len() as u64 {
            rest -= self.summand(k).len() as u64;
            k += 1;
        }
        k
    }
}

impl Causet for LinearSum {
    fn descriptor(&self) -> String {
        let sizes: Vec<String> = self.summands.iter().map(|p| format!("{:?}", p.covers())).collect();
        format!("linear-sum[{}]", sizes.join(";"))
    }

    fn less(&self, x: ElementId, y: ElementId) -> bool {
        let (kx, ix) = self.locate(x);
        let (ky, iy) = self.locate(y);
        if kx != ky {
            return kx < ky;
        }
        let p = self.summand(kx);
        p.less(p.id(ix), p.id(iy))
    }

    fn down(&self, x: ElementId) -> Vec<ElementId> {
        let (k, i) = self.locate(x);
        let p = self.summand(k);
        let mut v: Vec<ElementId> = (0..self.offset(k)).map(ElementId).collect();
        v.extend(p.below_bits(i).ones().map(|j| self.id(k, j)));
        v
    }

    fn lower_covers(&self, x: ElementId) -> Vec<ElementId> {
        let (k, i) = self.locate(x);
        let p = self.summand(k);
        let local = p.lower_cover_idx(i);
        if !local.is_empty() || k == 0 {
            return local.iter().map(|&j| self.id(k, j)).collect();
        }
        let prev = self.summand(k - 1);
        (0..prev.len())
            .filter(|&j| prev.upper_cover_idx(j).is_empty())
            .map(|j| self.id(k - 1, j))
            .collect()
    }

    fn minimal_after(&self, stem: &[ElementId], _budget: usize) -> Minimals {
        let k = self.current_summand(stem);
        let p = self.summand(k);
        let mut bits = fixedbitset::FixedBitSet::with_capacity(p.len());
        for &x in stem {
            let (kx, i) = self.locate(x);
            if kx == k {
                bits.insert(i);
            }
        }
        Minimals::all(p.minimal_outside(&bits).into_iter().map(|i| self.id(k, i)).collect())
    }

    fn label(&self, x: ElementId) -> String {
        let (k, i) = self.locate(x);
        format!("z{}_{}", k + 1, i + 1)
    }

    fn parse_label(&self, s: &str) -> Option<ElementId> {
        let (k, j) = s.strip_prefix('z')?.split_once('_')?;
        let k: u64 = k.parse().ok()?;
        let j: usize = j.parse().ok()?;
        (k >= 1 && j >= 1 && j <= self.summand(k - 1).len()).then(|| self.id(k - 1, j - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{finite_restriction, label_stem, restrict_any, Exhaustion};
    use crate::poset::shapes;

    #[test]
    fn singletons_make_a_chain() {
        let s = LinearSum::new(vec![shapes::chain(1)]);
        let p = finite_restriction(&s, &Exhaustion::Prefix, 2).unwrap();
        assert_eq!(p, shapes::chain(2));
    }

    #[test]
    fn minima_of_first_summand() {
        let s = LinearSum::new(vec![shapes::antichain(2)]);
        assert_eq!(label_stem(&s, &s.minimal_after(&[], 4).elems), "z1_1 z1_2");
        let z11 = s.parse_label("z1_1").unwrap();
        let z12 = s.parse_label("z1_2").unwrap();
        assert_eq!(label_stem(&s, &s.minimal_after(&[z11, z12], 4).elems), "z2_1 z2_2");
    }

    #[test]
    fn stacked_counts_multiply() {
        // Two stacked 2-antichains: e = 2 * 2.
        let s = LinearSum::new(vec![shapes::antichain(2)]);
        let p = finite_restriction(&s, &Exhaustion::Prefix, 4).unwrap();
        assert_eq!(p, restrict_any(&s, p.elements()).unwrap());
        let brute = crate::poset::enumerate_extensions(&p, 100).unwrap().len();
        assert_eq!(brute, 4);
    }

    #[test]
    fn mixed_period_round_trip() {
        let s = LinearSum::new(vec![shapes::chain(1), shapes::grid(2, 2), shapes::antichain(3)]);
        for i in 0..60 {
            let (k, j) = s.locate(ElementId(i));
            assert_eq!(s.id(k, j), ElementId(i));
            assert_eq!(s.parse_label(&s.label(ElementId(i))), Some(ElementId(i)));
        }
        let members = Exhaustion::Prefix.stem(&s, 20).unwrap();
        let a = crate::families::restrict_down_set(&s, &members).unwrap();
        assert_eq!(a, restrict_any(&s, &members).unwrap());
    }
}
