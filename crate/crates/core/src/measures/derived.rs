use super::{Appearance, Measure, MeasureError, MeasureRef, Transition};
use crate::exact::{Grade, Prob};
use crate::families::{check_ordered_stem, delete_stem, restrict_any, CausetRef};
use crate::poset::{enumerate_extensions, ElementId};

/// Orderings of the deleted stem compared before accepting it.
const ORDERINGS_CAP: usize = 5040;

/// μ_A on P∖A: `prob(b_1 ... b_k) = μ(a · b_1 ... b_k) / μ(a)`.
pub struct DerivedStem {
    base: MeasureRef,
    a: Vec<ElementId>,
    base_prob: Prob,
    support: CausetRef,
}

/// Derive the measure on `P∖A`, checking that every ordering of `A`
/// gives the same probability.
pub fn derived_stem_measure(mu: MeasureRef, a: &[ElementId]) -> Result<DerivedStem, MeasureError> {
    let base_prob = mu.prob(a)?;
    if !base_prob.is_positive() {
        return Err(MeasureError::ZeroProbabilityStem);
    }
    let o = mu.support().clone();
    let restricted = restrict_any(o.as_ref(), a)?;
    let tol = mu.grade().tolerance();
    for order in enumerate_extensions(&restricted, ORDERINGS_CAP)? {
        let p = mu.prob(&order)?;
        let diff = p.abs_diff(&base_prob);
        let differs = if p.is_exact() && base_prob.is_exact() { !diff.is_zero() } else { diff.to_f64() > tol };
        if differs {
            return Err(MeasureError::OrderDependent(base_prob.to_string(), p.to_string()));
        }
    }
    let support = delete_stem(o, a)?;
    Ok(DerivedStem { base: mu, a: a.to_vec(), base_prob, support })
}

impl DerivedStem {
    fn joined(&self, stem: &[ElementId]) -> Vec<ElementId> {
        let mut v = self.a.clone();
        v.extend_from_slice(stem);
        v
    }
}

impl Measure for DerivedStem {
    fn name(&self) -> String {
        format!("derived({}, {} deleted)", self.base.name(), self.a.len())
    }

    fn support(&self) -> &CausetRef {
        &self.support
    }

    fn grade(&self) -> Grade {
        self.base.grade()
    }

    fn weight(&self, stem: &[ElementId], x: ElementId) -> Result<Prob, MeasureError> {
        self.base.weight(&self.joined(stem), x)
    }

    fn transition(&self, stem: &[ElementId], budget: usize) -> Result<Transition, MeasureError> {
        self.base.transition(&self.joined(stem), budget)
    }

    fn prob(&self, stem: &[ElementId]) -> Result<Prob, MeasureError> {
        check_ordered_stem(self.support.as_ref(), stem)?;
        let p = self.base.prob(&self.joined(stem))?;
        p.div(&self.base_prob).ok_or(MeasureError::ZeroProbabilityStem)
    }

    fn weight_error(&self) -> f64 {
        self.base.weight_error()
    }

    fn appearance(&self, x: ElementId) -> Appearance {
        self.base.appearance(x)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::exact::Surd5;
    use crate::families::parse_stem;
    use crate::measures::flow::ratio;
    use crate::measures::{mu_q, LadderMeasure, PointMass};

    #[test]
    fn ladder_after_first_element() {
        let mu: MeasureRef = Arc::new(LadderMeasure::new());
        let o = mu.support().clone();
        let a = parse_stem(o.as_ref(), &["a1"]).unwrap();
        let d = derived_stem_measure(mu, &a).unwrap();
        let a2 = parse_stem(o.as_ref(), &["a2"]).unwrap();
        assert_eq!(d.prob(&a2).unwrap(), Prob::Exact(Surd5::phi()));
    }

    #[test]
    fn mu_q_after_b1() {
        let mu: MeasureRef = Arc::new(mu_q(ratio(1, 3)).unwrap());
        let o = mu.support().clone();
        let d = derived_stem_measure(mu, &parse_stem(o.as_ref(), &["b1"]).unwrap()).unwrap();
        assert_eq!(d.prob(&parse_stem(o.as_ref(), &["c1"]).unwrap()).unwrap(), Prob::ratio(2, 3));
        assert_eq!(d.transition(&[], 4).unwrap().total(), Prob::one());
    }

    #[test]
    fn order_dependent_and_null_stems_are_rejected() {
        let mu: MeasureRef = Arc::new(PointMass::alternating());
        let o = mu.support().clone();
        let bc = parse_stem(o.as_ref(), &["b1", "c1"]).unwrap();
        assert!(matches!(derived_stem_measure(mu.clone(), &bc), Err(MeasureError::OrderDependent(..))));
        let c = parse_stem(o.as_ref(), &["c1"]).unwrap();
        assert_eq!(derived_stem_measure(mu, &c).err(), Some(MeasureError::ZeroProbabilityStem));
    }
}
