use std::cmp::Ordering;

use super::{not_next, Appearance, Measure, MeasureError, MeasureRef, Transition};
use crate::exact::{Grade, Prob};
use crate::families::{check_ordered_stem, CausetRef};
use crate::poset::ElementId;

/// A finite convex combination of measures on one causet.
pub struct Mixture {
    parts: Vec<(MeasureRef, Prob)>,
    support: CausetRef,
}

pub fn mixture_measure(parts: Vec<(MeasureRef, Prob)>) -> Result<Mixture, MeasureError> {
    let Some((first, _)) = parts.first() else {
        return Err(MeasureError::InvalidParameter("a mixture needs at least one component".into()));
    };
    let support = first.support().clone();
    let d = support.descriptor();
    for (m, w) in &parts {
        let e = m.support().descriptor();
        if e != d {
            return Err(MeasureError::SupportMismatch(d, e));
        }
        if w.cmp_value(&Prob::zero()) == Ordering::Less {
            return Err(MeasureError::InvalidParameter(format!("negative mixture weight {w}")));
        }
    }
    let total = Prob::sum(parts.iter().map(|(_, w)| w));
    let off = total.abs_diff(&Prob::one());
    let tol = if total.is_exact() { 0.0 } else { 1e-12 };
    if off.to_f64() > tol || (total.is_exact() && !off.is_zero()) {
        return Err(MeasureError::InvalidParameter(format!("mixture weights sum to {total}")));
    }
    Ok(Mixture { parts, support })
}

impl Mixture {
    pub fn parts(&self) -> &[(MeasureRef, Prob)] {
        &self.parts
    }
}

impl Measure for Mixture {
    fn name(&self) -> String {
        let parts: Vec<String> = self.parts.iter().map(|(m, w)| format!("{w}*{}", m.name())).collect();
        format!("mixture[{}]", parts.join(" + "))
    }

    fn support(&self) -> &CausetRef {
        &self.support
    }

    fn grade(&self) -> Grade {
        self.parts
            .iter()
            .fold(Grade::ExactRational, |g, (m, w)| g.combine(m.grade()).combine(w.grade()))
    }

    fn prob(&self, stem: &[ElementId]) -> Result<Prob, MeasureError> {
        check_ordered_stem(self.support.as_ref(), stem)?;
        let mut acc = Prob::zero();
        for (m, w) in &self.parts {
            if !w.is_zero() {
                acc = acc.add(&w.mul(&m.prob(stem)?));
            }
        }
        Ok(acc)
    }

    fn weight(&self, stem: &[ElementId], x: ElementId) -> Result<Prob, MeasureError> {
        let mut next = stem.to_vec();
        next.push(x);
        check_ordered_stem(self.support.as_ref(), &next).map_err(|_| not_next(stem))?;
        let before = self.prob(stem)?;
        self.prob(&next)?.div(&before).ok_or(MeasureError::ZeroProbabilityStem)
    }

    /// Combines component transitions, weighted by each component's share
    /// `w_i prob_i(stem)` of the mixture's probability of `stem`.
    fn transition(&self, stem: &[ElementId], budget: usize) -> Result<Transition, MeasureError> {
        let mut shares = Vec::with_capacity(self.parts.len());
        for (mu, w) in &self.parts {
            if !w.is_zero() {
                let s = w.mul(&mu.prob(stem)?);
                if !s.is_zero() {
                    shares.push((mu, s));
                }
            }
        }
        let before = Prob::sum(shares.iter().map(|(_, s)| s));
        if before.is_zero() {
            return Err(MeasureError::ZeroProbabilityStem);
        }
        let mut combined: Option<Transition> = None;
        for (mu, share) in &shares {
            let t = mu.transition(stem, budget)?;
            let f = share.div(&before).ok_or(MeasureError::ZeroProbabilityStem)?;
            match combined.as_mut() {
                None => {
                    combined = Some(Transition {
                        weights: t.weights.iter().map(|(x, w)| (*x, w.mul(&f))).collect(),
                        exhaustive: t.exhaustive,
                        slack: f.to_f64() * t.slack,
                    })
                }
                Some(c) => {
                    for ((x, acc), (y, w)) in c.weights.iter_mut().zip(&t.weights) {
                        debug_assert_eq!(x, y);
                        *acc = acc.add(&w.mul(&f));
                    }
                    c.slack += f.to_f64() * t.slack;
                }
            }
        }
        Ok(combined.expect("some component has positive share"))
    }

    fn appearance(&self, x: ElementId) -> Appearance {
        let seen: Vec<Appearance> =
            self.parts.iter().filter(|(_, w)| !w.is_zero()).map(|(m, _)| m.appearance(x)).collect();
        if seen.iter().all(|a| *a == Appearance::Sure) {
            Appearance::Sure
        } else if seen.iter().all(|a| *a == Appearance::Never) {
            Appearance::Never
        } else {
            Appearance::Unknown
        }
    }

    fn components(&self) -> Option<Vec<(MeasureRef, Prob)>> {
        Some(self.parts.clone())
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::families::{parse_stem, Ladder};
    use crate::measures::flow::ratio;
    use crate::measures::{mu_q, LadderMeasure};

    fn q(num: i64, den: i64) -> MeasureRef {
        Arc::new(mu_q(ratio(num, den)).unwrap())
    }

    #[test]
    fn extreme_components() {
        let mix = mixture_measure(vec![(q(0, 1), Prob::ratio(1, 2)), (q(1, 1), Prob::ratio(1, 2))]).unwrap();
        let b1 = parse_stem(mix.support().as_ref(), &["b1"]).unwrap();
        assert_eq!(mix.prob(&b1).unwrap(), Prob::ratio(1, 2));
    }

    #[test]
    fn single_component_is_unchanged() {
        let base = q(1, 3);
        let mix = mixture_measure(vec![(base.clone(), Prob::one())]).unwrap();
        let s = parse_stem(mix.support().as_ref(), &["b1", "c1", "c2"]).unwrap();
        assert_eq!(mix.prob(&s).unwrap(), base.prob(&s).unwrap());
    }

    #[test]
    fn two_point_mixture() {
        let mix = mixture_measure(vec![(q(1, 5), Prob::ratio(1, 2)), (q(4, 5), Prob::ratio(1, 2))]).unwrap();
        let s = parse_stem(mix.support().as_ref(), &["b1", "b2"]).unwrap();
        assert_eq!(mix.prob(&s).unwrap(), Prob::ratio(34, 100));
        let t = mix.transition(&s[..1], 4).unwrap();
        assert_eq!(t.total(), Prob::one());
        assert_eq!(t.weight_of(s[1]), Some(&Prob::ratio(17, 25)));
    }

    #[test]
    fn supports_must_match() {
        let _ = Ladder;
        let r = mixture_measure(vec![(q(1, 2), Prob::ratio(1, 2)), (Arc::new(LadderMeasure::new()), Prob::ratio(1, 2))]);
        assert!(matches!(r, Err(MeasureError::SupportMismatch(..))));
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(mixture_measure(vec![(q(1, 2), Prob::ratio(1, 3))]).is_err());
    }
}
