//! Order-invariant measures, presented through stem probabilities and
//! next-element transition laws.
//!
//! A measure assigns `prob(a_1 ... a_k)` to each ordered stem, the
//! probability that a random natural extension starts with that sequence.
//! Unless a measure overrides it, `prob` is the product of transition
//! weights along the stem.

mod condition;
mod derived;
mod flow;
pub mod grid;
mod ladder;
pub mod limit;
mod mixture;
mod point;
pub mod tree;
mod uniform;
mod urn;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::exact::{Grade, Prob};
use crate::families::{check_ordered_stem, CausetRef, FamilyError};
use crate::poset::{ElementId, PosetError};

pub use condition::{condition_on_appearance, Conditioned};
pub use derived::{derived_stem_measure, DerivedStem};
pub use flow::{flow_measure, mu_q, FlowMeasure, FlowSpec};
pub use grid::grid_finite_nu;
pub use ladder::LadderMeasure;
pub use limit::{limit_measure_eval, ConvergenceReport, Verdict};
pub use mixture::{mixture_measure, Mixture};
pub use point::PointMass;
pub use tree::{tree_marking_sampler, tree_measure, TreeMeasure, TreeMeasureResult};
pub use uniform::{StackedUniform, UniformFinite};
pub use urn::UrnMeasure;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("not an ordered stem: element at position {position} is not minimal in what remains")]
    NotAStem { position: usize },
    #[error("flow identity fails after stem [{stem}]: minimal elements carry {sum}")]
    FlowViolation { stem: String, sum: String },
    #[error("the support has a maximal element {0}")]
    HasMaximalElement(String),
    #[error("components live on different causets: {0} and {1}")]
    SupportMismatch(String, String),
    #[error("no usable tail bound for the truncated sum")]
    TailUnbounded,
    #[error("the conditioning stem has probability zero")]
    ZeroProbabilityStem,
    #[error("orderings of the stem receive different probabilities: {0} vs {1}")]
    OrderDependent(String, String),
    #[error("not a Young diagram: {0}")]
    NotAYoungDiagram(String),
    #[error("appearance of {element} undecided at horizon {horizon}: estimate {estimate}")]
    InconclusiveAtHorizon { element: String, horizon: usize, estimate: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Family(FamilyError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

impl From<FamilyError> for MeasureError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::NotAnOrderedStem { position } => MeasureError::NotAStem { position },
            FamilyError::Poset(p) => MeasureError::Poset(p),
            other => MeasureError::Family(other),
        }
    }
}

/// Law of the next element after a stem.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    /// Minimal elements of the complement with their weights, by id.
    pub weights: Vec<(ElementId, Prob)>,
    /// False when the minimal elements were truncated.
    pub exhaustive: bool,
    /// Bound on `|1 - sum of weights|`: mass of unlisted elements plus any
    /// truncation error in the listed weights.
    pub slack: f64,
}

impl Transition {
    pub fn total(&self) -> Prob {
        Prob::sum(self.weights.iter().map(|(_, w)| w))
    }

    pub fn weight_of(&self, x: ElementId) -> Option<&Prob> {
        self.weights.iter().find(|(y, _)| *y == x).map(|(_, w)| w)
    }
}

/// Whether an element is ever chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Appearance {
    Sure,
    Never,
    Unknown,
}

pub trait Measure: Send + Sync {
    fn name(&self) -> String;

    fn support(&self) -> &CausetRef;

    fn grade(&self) -> Grade;

    /// Probability that `x` comes next after the ordered stem `stem`; `x`
    /// must be minimal in the complement.
    fn weight(&self, stem: &[ElementId], x: ElementId) -> Result<Prob, MeasureError>;

    /// Bound on the total weight of minimal elements missing from `listed`,
    /// used when the minimal elements are infinite.
    fn unlisted_mass(&self, _stem: &[ElementId], _listed: &[ElementId]) -> Option<f64> {
        None
    }

    /// Weight error on top of `unlisted_mass`, for truncated evaluations.
    fn weight_error(&self) -> f64 {
        0.0
    }

    fn transition(&self, stem: &[ElementId], budget: usize) -> Result<Transition, MeasureError> {
        let m = self.support().minimal_after(stem, budget);
        let weights = m
            .elems
            .iter()
            .map(|&x| Ok((x, self.weight(stem, x)?)))
            .collect::<Result<Vec<_>, MeasureError>>()?;
        let mut slack = weights.len() as f64 * self.weight_error();
        if !m.exhaustive {
            slack += self.unlisted_mass(stem, &m.elems).ok_or(MeasureError::TailUnbounded)?;
        }
        Ok(Transition { weights, exhaustive: m.exhaustive, slack })
    }

    /// `prob(E(a_1 ... a_k))`.
    fn prob(&self, stem: &[ElementId]) -> Result<Prob, MeasureError> {
        check_ordered_stem(self.support().as_ref(), stem)?;
        let mut p = Prob::one();
        for k in 0..stem.len() {
            p = p.mul(&self.weight(&stem[..k], stem[k])?);
            if p.is_zero() {
                break;
            }
        }
        Ok(p)
    }

    fn appearance(&self, _x: ElementId) -> Appearance {
        Appearance::Unknown
    }

    /// Mixture components with their weights, for mixtures.
    fn components(&self) -> Option<Vec<(MeasureRef, Prob)>> {
        None
    }
}

pub type MeasureRef = Arc<dyn Measure>;

impl fmt::Debug for dyn Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Measure({} on {})", self.name(), self.support().descriptor())
    }
}

/// The error for an `x` that is not minimal after `stem`.
pub(crate) fn not_next(stem: &[ElementId]) -> MeasureError {
    MeasureError::NotAStem { position: stem.len() }
}
