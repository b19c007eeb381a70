//! Checkers for the defining properties of order-invariant measures,
//! process simulation, and empirical tests.
//!
//! Every checker returns a [`CheckReport`]: the largest violation found,
//! the stems or pairs responsible, and a pass/fail verdict against the
//! tolerance of the measure's grade.

mod absence;
mod checks;
mod compact;
pub mod controls;
mod essential;
mod simulate;
mod stems;

use serde::Serialize;
use thiserror::Error;

use crate::exact::{Grade, Prob, ValueRecord};
use crate::families::FamilyError;
use crate::measures::MeasureError;
use crate::poset::PosetError;

pub use absence::{absence_bound_check, check_rank_monotonicity, crossed_absence_check, rank_profile_report};
pub use checks::{check_kolmogorov, check_order_invariance, check_order_markov, InvarianceMode};
pub use compact::compactness_witness;
pub use essential::{essentiality_test, ESSENTIAL_TOL};
pub use simulate::{estimate_event, simulate, EventEstimate, Trajectory, SIGMAS};
pub use stems::{down_sets, ordered_stems, StemWalk, DEFAULT_STEM_BUDGET};

/// Witnesses kept per report; further violations are only counted.
pub const MAX_WITNESSES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("element {0} is not maximal")]
    NotMaximal(String),
    #[error("simulation stalled at step {step}: sampled mass beyond the listed minimal elements")]
    Stalled { step: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

impl From<FamilyError> for AnalysisError {
    fn from(e: FamilyError) -> Self {
        AnalysisError::Measure(e.into())
    }
}

impl From<PosetError> for AnalysisError {
    fn from(e: PosetError) -> Self {
        AnalysisError::Measure(e.into())
    }
}

/// A small table of strings attached to a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub property: String,
    pub depth: usize,
    /// Largest violation beyond declared truncation error.
    pub residual: Prob,
    pub witnesses: Vec<String>,
    pub passed: bool,
    pub grade: Grade,
    pub notes: Vec<String>,
    pub table: Option<Table>,
}

impl CheckReport {
    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.grade.tolerance()
    }

    /// Merge a replica or sub-check: max residual, union of witnesses.
    pub fn merge(mut self, other: CheckReport) -> CheckReport {
        if other.residual.cmp_value(&self.residual).is_gt() {
            self.residual = other.residual;
        }
        self.grade = self.grade.combine(other.grade);
        self.passed &= other.passed;
        self.witnesses.extend(other.witnesses);
        self.witnesses.truncate(MAX_WITNESSES);
        self.notes.extend(other.notes);
        self
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum ResidualRecord {
    Rational { residual_num: String, residual_den: String },
    Quadratic { residual_p: String, residual_q: String, residual_r: String, residual_surd: u32 },
    Float { residual_float: f64 },
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    property: &'a str,
    depth: usize,
    verdict: &'a str,
    grade: Grade,
    #[serde(flatten)]
    residual: ResidualRecord,
    tolerance: f64,
    witnesses: &'a [String],
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    notes: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<&'a Table>,
}

impl Serialize for CheckReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let residual = match ValueRecord::from_prob(&self.residual) {
            ValueRecord::Rational { num, den } => ResidualRecord::Rational { residual_num: num, residual_den: den },
            ValueRecord::Quadratic { p, q, r, surd } => ResidualRecord::Quadratic {
                residual_p: p,
                residual_q: q,
                residual_r: r,
                residual_surd: surd,
            },
            ValueRecord::Float { float } => ResidualRecord::Float { residual_float: float },
        };
        ReportRecord {
            property: &self.property,
            depth: self.depth,
            verdict: self.verdict(),
            grade: self.grade,
            residual,
            tolerance: self.tolerance(),
            witnesses: &self.witnesses,
            notes: &self.notes,
            table: self.table.as_ref(),
        }
        .serialize(s)
    }
}

/// Running maximum of violations with their witnesses.
pub(crate) struct Tally {
    property: String,
    depth: usize,
    grade: Grade,
    residual: Prob,
    witnesses: Vec<String>,
    violations: usize,
    notes: Vec<String>,
}

impl Tally {
    pub(crate) fn new(property: &str, depth: usize, grade: Grade) -> Self {
        Self {
            property: property.into(),
            depth,
            grade,
            residual: Prob::zero(),
            witnesses: Vec::new(),
            violations: 0,
            notes: Vec::new(),
        }
    }

    /// Record a violation of size `excess`; a witness is kept when it
    /// exceeds the grade tolerance.
    pub(crate) fn observe(&mut self, excess: Prob, witness: impl FnOnce() -> String) {
        let over = if self.grade.is_exact() && excess.is_exact() {
            !excess.is_zero()
        } else {
            excess.to_f64() > self.grade.tolerance()
        };
        if over {
            self.violations += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
        if excess.cmp_value(&self.residual).is_gt() {
            self.residual = excess;
        }
    }

    /// Demote to float grading, used once truncation enters the residual.
    pub(crate) fn degrade(&mut self, grade: Grade) {
        self.grade = self.grade.combine(grade);
    }

    pub(crate) fn note(&mut self, note: impl Into<String>) {
        let note = note.into();
        if !self.notes.contains(&note) {
            self.notes.push(note);
        }
    }

    pub(crate) fn finish(mut self) -> CheckReport {
        if self.violations > self.witnesses.len() {
            self.notes.push(format!("{} violations, first {} listed", self.violations, self.witnesses.len()));
        }
        CheckReport {
            property: self.property,
            depth: self.depth,
            passed: self.violations == 0,
            residual: self.residual,
            witnesses: self.witnesses,
            grade: self.grade,
            notes: self.notes,
            table: None,
        }
    }
}

/// `(|d| - allowance)^+`, exact when nothing is allowed.
pub(crate) fn excess(d: Prob, allowance: f64) -> Prob {
    if allowance == 0.0 && d.is_exact() {
        d
    } else {
        Prob::Float((d.to_f64() - allowance).max(0.0))
    }
}
