use std::sync::Arc;

use super::{not_next, Measure, MeasureError};
use crate::exact::{Grade, Prob, Surd5};
use crate::families::{check_ordered_stem, CausetRef, Ladder};
use crate::poset::ElementId;

/// The unique order-invariant measure on the ladder, exact in Q(√5).
///
/// Every stem of the ladder is either `Z_k = {a_1..a_k}` or
/// `W_k = {a_1..a_{k-1}, a_{k+1}}`. From `Z_k` the process moves to `a_{k+1}`
/// with weight φ and to `a_{k+2}` with weight φ²; from `W_k` it must take `a_k`.
/// Stem probabilities are φ^k on `Z_k` and φ^(k+1) on `W_k`.
pub struct LadderMeasure {
    support: CausetRef,
}

enum Shape {
    Z(u64),
    W(u64),
}

/// Ids of the ladder are `a_i -> i - 1`, so `Z_k` is `{0..k-1}`.
fn shape(stem: &[ElementId]) -> Option<Shape> {
    let k = stem.len() as u64;
    let max = stem.iter().map(|x| x.0).max();
    match max {
        None => Some(Shape::Z(0)),
        Some(m) if m + 1 == k => Some(Shape::Z(k)),
        Some(m) if m == k && !stem.contains(&ElementId(k - 1)) => Some(Shape::W(k)),
        _ => None,
    }
}

impl LadderMeasure {
    pub fn new() -> Self {
        Self { support: Arc::new(Ladder) }
    }
}

impl Default for LadderMeasure {
    fn default() -> Self {
        Self::new()
    }
}

impl Measure for LadderMeasure {
    fn name(&self) -> String {
        "ladder".into()
    }

    fn support(&self) -> &CausetRef {
        &self.support
    }

    fn grade(&self) -> Grade {
        Grade::ExactQuadratic
    }

    fn weight(&self, stem: &[ElementId], x: ElementId) -> Result<Prob, MeasureError> {
        let phi = Surd5::phi();
        match shape(stem).ok_or_else(|| not_next(stem))? {
            Shape::Z(k) if x.0 == k => Ok(Prob::Exact(phi)),
            Shape::Z(k) if x.0 == k + 1 => Ok(Prob::Exact(phi.pow(2))),
            Shape::W(k) if x.0 == k - 1 => Ok(Prob::one()),
            _ => Err(not_next(stem)),
        }
    }

    fn prob(&self, stem: &[ElementId]) -> Result<Prob, MeasureError> {
        check_ordered_stem(self.support.as_ref(), stem)?;
        let phi = Surd5::phi();
        let k = stem.len() as u32;
        match shape(stem).expect("ordered stems of the ladder are Z or W shaped") {
            Shape::Z(_) => Ok(Prob::Exact(phi.pow(k))),
            Shape::W(_) => Ok(Prob::Exact(phi.pow(k + 1))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::parse_stem;

    fn stem(mu: &LadderMeasure, s: &str) -> Vec<ElementId> {
        parse_stem(mu.support().as_ref(), &s.split_whitespace().collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn first_element_is_phi() {
        let mu = LadderMeasure::new();
        let p = mu.prob(&stem(&mu, "a1")).unwrap();
        assert_eq!(p, Prob::Exact(Surd5::phi()));
        assert!((p.to_f64() - 0.618_034).abs() < 1e-6);
    }

    #[test]
    fn both_orders_give_phi_squared() {
        let mu = LadderMeasure::new();
        let sq = Prob::Exact(Surd5::phi().pow(2));
        assert_eq!(mu.prob(&stem(&mu, "a1 a2")).unwrap(), sq);
        assert_eq!(mu.prob(&stem(&mu, "a2 a1")).unwrap(), sq);
    }

    #[test]
    fn skipping_stem_gets_extra_power() {
        let mu = LadderMeasure::new();
        let p = mu.prob(&stem(&mu, "a1 a2 a4")).unwrap();
        assert_eq!(p, Prob::Exact(Surd5::phi().pow(4)));
    }

    #[test]
    fn product_of_weights_matches_closed_form() {
        let mu = LadderMeasure::new();
        for s in ["a1 a3 a2 a4", "a2 a1 a3 a5 a4", "a1 a2 a3 a4 a6"] {
            let st = stem(&mu, s);
            let mut p = Prob::one();
            for k in 0..st.len() {
                p = p.mul(&mu.weight(&st[..k], st[k]).unwrap());
            }
            assert_eq!(p, mu.prob(&st).unwrap(), "{s}");
        }
    }

    #[test]
    fn rejects_non_stems() {
        let mu = LadderMeasure::new();
        assert!(mu.prob(&stem(&mu, "a3")).is_err());
    }
}
