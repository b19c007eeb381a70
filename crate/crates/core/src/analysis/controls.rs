//! Deliberately broken measures used as negative controls for the checkers.

use std::sync::Arc;

use crate::measures::{Measure, MeasureError, MeasureRef};
use crate::exact::{Grade, Prob};
use crate::families::{CausetRef, DisjointChains};
use crate::poset::ElementId;

/// A measure with one transition weight shifted by `delta`.
pub struct Perturbed {
    base: MeasureRef,
    stem: Vec<ElementId>,
    target: ElementId,
    delta: Prob,
}

impl Perturbed {
    pub fn new(base: MeasureRef, stem: Vec<ElementId>, target: ElementId, delta: Prob) -> Self {
        Self { base, stem, target, delta }
    }
}

impl Measure for Perturbed {
    fn name(&self) -> String {
        format!("perturbed({})", self.base.name())
    }

    fn support(&self) -> &CausetRef {
        self.base.support()
    }

    fn grade(&self) -> Grade {
        self.base.grade()
    }

    fn weight(&self, stem: &[ElementId], x: ElementId) -> Result<Prob, MeasureError> {
        let w = self.base.weight(stem, x)?;
        if stem == self.stem.as_slice() && x == self.target {
            Ok(w.add(&self.delta))
        } else {
            Ok(w)
        }
    }

    fn unlisted_mass(&self, stem: &[ElementId], listed: &[ElementId]) -> Option<f64> {
        self.base.unlisted_mass(stem, listed)
    }
}

/// On two chains, repeat the chain of the last element with probability
/// 2/3; the first step is fair. Consistent but order-dependent.
pub struct StickyKernel {
    chains: DisjointChains,
    support: CausetRef,
}

impl StickyKernel {
    pub fn new() -> Self {
        let chains = DisjointChains::new(Some(2));
        Self { chains, support: Arc::new(chains) }
    }
}

impl Default for StickyKernel {
    fn default() -> Self {
        Self::new()
    }
}

impl Measure for StickyKernel {
    fn name(&self) -> String {
        "sticky-kernel".into()
    }

    fn support(&self) -> &CausetRef {
        &self.support
    }

    fn grade(&self) -> Grade {
        Grade::ExactRational
    }

    fn weight(&self, stem: &[ElementId], x: ElementId) -> Result<Prob, MeasureError> {
        let heights = self.chains.heights(stem);
        let (c, pos) = self.chains.locate(x);
        if heights.get(&c).copied().unwrap_or(0) != pos {
            return Err(MeasureError::NotAStem { position: stem.len() });
        }
        Ok(match stem.last() {
            None => Prob::ratio(1, 2),
            Some(&last) if self.chains.locate(last).0 == c => Prob::ratio(2, 3),
            Some(_) => Prob::ratio(1, 3),
        })
    }
}
