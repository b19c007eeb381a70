use std::sync::Arc;

use super::{not_next, Measure, MeasureError};
use crate::exact::{Grade, Prob};
use crate::families::{CausetRef, DisjointChains};
use crate::poset::ElementId;

/// Pólya's urn on two chains: after `n` steps of which `m` took a `b`, the
/// next `b` has weight `(m+1)/(n+2)` and the next `c` the rest.
pub struct UrnMeasure {
    chains: DisjointChains,
    support: CausetRef,
}

impl UrnMeasure {
    pub fn new() -> Self {
        let chains = DisjointChains::new(Some(2));
        Self { chains, support: Arc::new(chains) }
    }
}

impl Default for UrnMeasure {
    fn default() -> Self {
        Self::new()
    }
}

impl Measure for UrnMeasure {
    fn name(&self) -> String {
        "urn".into()
    }

    fn support(&self) -> &CausetRef {
        &self.support
    }

    fn grade(&self) -> Grade {
        Grade::ExactRational
    }

    fn weight(&self, stem: &[ElementId], x: ElementId) -> Result<Prob, MeasureError> {
        let n = stem.len() as i64;
        let m = stem.iter().filter(|&&y| self.chains.locate(y).0 == 0).count() as i64;
        match self.chains.locate(x) {
            (0, pos) if pos as i64 == m => Ok(Prob::ratio(m + 1, n + 2)),
            (1, pos) if pos as i64 == n - m => Ok(Prob::ratio(n - m + 1, n + 2)),
            _ => Err(not_next(stem)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::parse_stem;

    fn stem(mu: &UrnMeasure, s: &str) -> Vec<ElementId> {
        parse_stem(mu.support().as_ref(), &s.split_whitespace().collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn b_weight_after_three_steps() {
        let mu = UrnMeasure::new();
        let t = mu.transition(&stem(&mu, "b1 b2 c1"), 4).unwrap();
        let b3 = stem(&mu, "b3")[0];
        assert_eq!(t.weight_of(b3), Some(&Prob::ratio(3, 5)));
        assert_eq!(t.total(), Prob::one());
    }

    #[test]
    fn small_stems() {
        let mu = UrnMeasure::new();
        assert_eq!(mu.prob(&stem(&mu, "b1")).unwrap(), Prob::ratio(1, 2));
        assert_eq!(mu.prob(&stem(&mu, "b1 c1")).unwrap(), Prob::ratio(1, 6));
        assert_eq!(mu.prob(&stem(&mu, "c1 b1")).unwrap(), Prob::ratio(1, 6));
    }
}
