//! ν^{Z_n}(E(stem)) along an exhaustion, with a convergence verdict.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::MeasureError;
use crate::exact::{Prob, ValueRecord};
use crate::families::{check_ordered_stem, restrict_down_set, Causet, Exhaustion, FamilyError};
use crate::poset::ElementId;

/// Values compared by the convergence rule.
pub const CONVERGENCE_WINDOW: usize = 5;
/// Values compared by the oscillation rule.
pub const OSCILLATION_WINDOW: usize = 6;
/// The oscillation gap must exceed this multiple of the tolerance.
pub const OSCILLATION_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Converged { limit: f64, tol: f64 },
    Oscillating { gap: f64, threshold: f64 },
    Inconclusive,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Converged { .. } => "converged",
            Verdict::Oscillating { .. } => "oscillating",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub exhaustion: String,
    /// `(n, ν^{Z_n}(E(stem)))` for every `n` whose stem contains the query.
    pub values: Vec<(usize, BigRational)>,
    pub verdict: Verdict,
}

#[derive(Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub num: String,
    pub den: String,
    pub float: f64,
}

impl ConvergenceReport {
    pub fn rows(&self) -> Vec<ConvergenceRow> {
        self.values
            .iter()
            .map(|(n, v)| ConvergenceRow {
                n: *n,
                num: v.numer().to_string(),
                den: v.denom().to_string(),
                float: v.to_f64().unwrap_or(f64::NAN),
            })
            .collect()
    }

    pub fn last(&self) -> Option<ValueRecord> {
        self.values.last().map(|(_, v)| ValueRecord::from_prob(&Prob::rational(v.clone())))
    }
}

/// Classify a sequence: converged when the last five values lie within
/// `tol` of each other; oscillating when the means of the even- and
/// odd-indexed values among the last six differ by more than `10·tol`.
pub fn classify(values: &[(usize, f64)], tol: f64) -> Verdict {
    if values.len() >= CONVERGENCE_WINDOW {
        let tail = &values[values.len() - CONVERGENCE_WINDOW..];
        let lo = tail.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        let hi = tail.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo <= tol {
            return Verdict::Converged { limit: tail[tail.len() - 1].1, tol };
        }
    }
    if values.len() >= OSCILLATION_WINDOW {
        let tail = &values[values.len() - OSCILLATION_WINDOW..];
        let mean = |parity: usize| {
            let v: Vec<f64> = tail.iter().filter(|(n, _)| n % 2 == parity).map(|v| v.1).collect();
            v.iter().sum::<f64>() / v.len().max(1) as f64
        };
        let gap = (mean(0) - mean(1)).abs();
        let threshold = OSCILLATION_FACTOR * tol;
        if gap > threshold {
            return Verdict::Oscillating { gap, threshold };
        }
    }
    Verdict::Inconclusive
}

/// Evaluate ν^{Z_n}(E(stem)) exactly for `n = 1..=n_max` and classify.
///
/// Values of `n` whose stem does not contain the query are skipped; an
/// exhaustion that stops before `n_max` ends the sequence early.
pub fn limit_measure_eval(
    o: &dyn Causet,
    exhaustion: &Exhaustion,
    stem: &[ElementId],
    n_max: usize,
    tol: f64,
) -> Result<ConvergenceReport, MeasureError> {
    check_ordered_stem(o, stem)?;
    let mut values = Vec::new();
    for n in 1..=n_max {
        let members = match exhaustion.stem(o, n) {
            Ok(m) => m,
            Err(FamilyError::NotExhaustive { .. }) if !values.is_empty() => break,
            Err(e) => return Err(e.into()),
        };
        let set: HashSet<ElementId> = members.iter().copied().collect();
        if !stem.iter().all(|x| set.contains(x)) {
            continue;
        }
        let p = restrict_down_set(o, &members)?;
        values.push((n, p.nu_uniform(stem)?));
    }
    let floats: Vec<(usize, f64)> = values.iter().map(|(n, v)| (*n, v.to_f64().unwrap_or(f64::NAN))).collect();
    let verdict = classify(&floats, tol);
    Ok(ConvergenceReport { exhaustion: exhaustion.name().to_string(), values, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{parse_stem, Grid, Ladder};

    #[test]
    fn ladder_converges_to_phi() {
        let s = parse_stem(&Ladder, &["a1"]).unwrap();
        let r = limit_measure_eval(&Ladder, &Exhaustion::Prefix, &s, 40, 1e-6).unwrap();
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        match r.verdict {
            Verdict::Converged { limit, .. } => assert!((limit - phi).abs() < 1e-6),
            v => panic!("{v:?}"),
        }
        assert_eq!(r.values[4].1, BigRational::new(5.into(), 8.into()));
    }

    #[test]
    fn grid_square_is_constant() {
        let s = parse_stem(&Grid, &["(0,0)", "(1,0)"]).unwrap();
        let r = limit_measure_eval(&Grid, &Exhaustion::Named("square".into()), &s, 6, 1e-9).unwrap();
        assert!(r.values.iter().all(|(_, v)| *v == BigRational::new(1.into(), 2.into())));
        assert_eq!(r.verdict.name(), "converged");
    }

    #[test]
    fn classify_rules() {
        let alt: Vec<(usize, f64)> = (1..=8).map(|n| (n, if n % 2 == 0 { 0.4 } else { 0.9 })).collect();
        assert!(matches!(classify(&alt, 1e-3), Verdict::Oscillating { .. }));
        let flat: Vec<(usize, f64)> = (1..=5).map(|n| (n, 0.5)).collect();
        assert!(matches!(classify(&flat, 1e-9), Verdict::Converged { .. }));
        let drift: Vec<(usize, f64)> = (1..=8).map(|n| (n, n as f64 * 1e-3)).collect();
        assert_eq!(classify(&drift, 1e-3), Verdict::Inconclusive);
    }
}
