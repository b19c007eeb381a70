use std::sync::Arc;

use super::{mixture_measure, Appearance, Measure, MeasureError, MeasureRef};
use crate::exact::Prob;
use crate::families::DEFAULT_LIST_BUDGET;
use crate::poset::ElementId;

/// Stems explored when deciding appearance by exhaustive search.
const SEARCH_BUDGET: usize = 100_000;

/// μ split by whether an element is ever chosen: `plus` is μ conditioned on
/// the element appearing, `minus` on it never appearing. A side is `None`
/// when its event has probability zero.
#[derive(Debug)]
pub struct Conditioned {
    pub plus: Option<MeasureRef>,
    pub minus: Option<MeasureRef>,
    pub appearance: Prob,
}

/// Condition on the appearance of `b`.
///
/// Exact for finite mixtures whose components each choose `b` almost surely
/// or never. Otherwise the probability that `b` appears within `horizon`
/// steps is computed exactly; only a value of exactly 1 is accepted.
pub fn condition_on_appearance(mu: MeasureRef, b: ElementId, horizon: usize) -> Result<Conditioned, MeasureError> {
    let label = || mu.support().label(b);
    if let Some(parts) = mu.components() {
        let mut sure = Vec::new();
        let mut never = Vec::new();
        for (m, w) in parts.into_iter().filter(|(_, w)| !w.is_zero()) {
            match m.appearance(b) {
                Appearance::Sure => sure.push((m, w)),
                Appearance::Never => never.push((m, w)),
                Appearance::Unknown => {
                    return Err(MeasureError::InconclusiveAtHorizon {
                        element: label(),
                        horizon: 0,
                        estimate: format!("component {} undecided", m.name()),
                    })
                }
            }
        }
        let mass = |v: &[(MeasureRef, Prob)]| Prob::sum(v.iter().map(|(_, w)| w));
        let appearance = mass(&sure);
        return Ok(Conditioned { plus: renormalize(sure)?, minus: renormalize(never)?, appearance });
    }
    match mu.appearance(b) {
        Appearance::Sure => return Ok(Conditioned { plus: Some(mu), minus: None, appearance: Prob::one() }),
        Appearance::Never => return Ok(Conditioned { plus: None, minus: Some(mu), appearance: Prob::zero() }),
        Appearance::Unknown => {}
    }
    let p = appears_within(mu.as_ref(), b, horizon).map_err(|estimate| MeasureError::InconclusiveAtHorizon {
        element: label(),
        horizon,
        estimate,
    })?;
    if p == Prob::one() {
        Ok(Conditioned { plus: Some(mu), minus: None, appearance: p })
    } else {
        Err(MeasureError::InconclusiveAtHorizon { element: label(), horizon, estimate: p.to_string() })
    }
}

fn renormalize(parts: Vec<(MeasureRef, Prob)>) -> Result<Option<MeasureRef>, MeasureError> {
    match parts.len() {
        0 => Ok(None),
        1 => Ok(Some(parts.into_iter().next().expect("one part").0)),
        _ => {
            let total = Prob::sum(parts.iter().map(|(_, w)| w));
            let scaled = parts
                .into_iter()
                .map(|(m, w)| (m, w.div(&total).expect("positive total")))
                .collect();
            Ok(Some(Arc::new(mixture_measure(scaled)?)))
        }
    }
}

/// Exact probability that `b` is chosen within `horizon` steps, or a
/// description of why it could not be computed.
fn appears_within(mu: &dyn Measure, b: ElementId, horizon: usize) -> Result<Prob, String> {
    if !mu.grade().is_exact() {
        return Err(format!("{} measure", mu.grade()));
    }
    let mut total = Prob::zero();
    let mut visited = 0usize;
    let mut stack: Vec<(Vec<ElementId>, Prob)> = vec![(Vec::new(), Prob::one())];
    while let Some((stem, p)) = stack.pop() {
        visited += 1;
        if visited > SEARCH_BUDGET {
            return Err(format!("more than {SEARCH_BUDGET} stems"));
        }
        if stem.len() >= horizon {
            continue;
        }
        let t = mu.transition(&stem, DEFAULT_LIST_BUDGET).map_err(|e| e.to_string())?;
        if !t.exhaustive {
            return Err("infinitely many minimal elements".into());
        }
        for (x, w) in t.weights {
            if w.is_zero() {
                continue;
            }
            let q = p.mul(&w);
            if x == b {
                total = total.add(&q);
            } else {
                let mut next = stem.clone();
                next.push(x);
                stack.push((next, q));
            }
        }
    }
    Ok(total)
}
