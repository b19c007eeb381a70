use std::sync::Arc;

use super::{Appearance, Measure, MeasureError};
use crate::exact::{Grade, Prob};
use crate::families::{CausetRef, ChainPlusPoint, DisjointChains, DEFAULT_LIST_BUDGET};
use crate::poset::ElementId;

type Path = Arc<dyn Fn(usize) -> ElementId + Send + Sync>;

/// Steps scanned when deciding whether an element lies on the path.
const APPEARANCE_SCAN: usize = 100_000;

/// All mass on one natural extension `path(0) path(1) ...`.
///
/// Off the path the conditional law is arbitrary; this one takes the
/// smallest minimal element.
pub struct PointMass {
    name: String,
    support: CausetRef,
    path: Path,
}

impl PointMass {
    pub fn new(
        name: impl Into<String>,
        support: CausetRef,
        path: impl Fn(usize) -> ElementId + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), support, path: Arc::new(path) }
    }

    /// `b_1 b_2 ...` on a chain with an extra isolated point.
    pub fn chain_skipping_point() -> Self {
        Self::new("chain-point-mass", Arc::new(ChainPlusPoint), |i| ElementId(i as u64 + 1))
    }

    /// `b_1 c_1 b_2 c_2 ...` on two chains.
    pub fn alternating() -> Self {
        Self::new("alternating-point-mass", Arc::new(DisjointChains::new(Some(2))), |i| ElementId(i as u64))
    }

    fn on_path(&self, stem: &[ElementId]) -> bool {
        stem.iter().enumerate().all(|(i, &x)| (self.path)(i) == x)
    }
}

impl Measure for PointMass {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn support(&self) -> &CausetRef {
        &self.support
    }

    fn grade(&self) -> Grade {
        Grade::ExactRational
    }

    fn weight(&self, stem: &[ElementId], x: ElementId) -> Result<Prob, MeasureError> {
        let next = if self.on_path(stem) {
            (self.path)(stem.len())
        } else {
            let m = self.support.minimal_after(stem, DEFAULT_LIST_BUDGET);
            *m.elems.first().ok_or_else(|| super::not_next(stem))?
        };
        Ok(if x == next { Prob::one() } else { Prob::zero() })
    }

    fn appearance(&self, x: ElementId) -> Appearance {
        if (0..APPEARANCE_SCAN).any(|i| (self.path)(i) == x) {
            Appearance::Sure
        } else {
            Appearance::Unknown
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::parse_stem;

    #[test]
    fn chain_point_mass_follows_the_chain() {
        let mu = PointMass::chain_skipping_point();
        let o = mu.support().clone();
        let b = parse_stem(o.as_ref(), &["b1", "b2", "b3"]).unwrap();
        assert_eq!(mu.prob(&b).unwrap(), Prob::one());
        let x = parse_stem(o.as_ref(), &["x"]).unwrap();
        assert_eq!(mu.prob(&x).unwrap(), Prob::zero());
        let t = mu.transition(&x, 4).unwrap();
        assert_eq!(t.total(), Prob::one());
    }

    #[test]
    fn alternating_is_not_symmetric() {
        let mu = PointMass::alternating();
        let o = mu.support().clone();
        let bc = parse_stem(o.as_ref(), &["b1", "c1"]).unwrap();
        let cb = parse_stem(o.as_ref(), &["c1", "b1"]).unwrap();
        assert_eq!(mu.prob(&bc).unwrap(), Prob::one());
        assert_eq!(mu.prob(&cb).unwrap(), Prob::zero());
    }
}
