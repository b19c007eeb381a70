use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::{not_next, Measure, MeasureError};
use crate::exact::{ratio_of, Grade, Prob};
use crate::families::{CausetRef, FiniteCauset, LinearSum};
use crate::poset::{ElementId, ExtensionTable, FinitePoset, DEFAULT_STATE_BUDGET};

/// ν^P on a finite poset: the next element is chosen with probability
/// proportional to the number of linear extensions that continue with it.
pub struct UniformFinite {
    poset: FinitePoset,
    table: ExtensionTable,
    support: CausetRef,
}

impl UniformFinite {
    pub fn new(poset: FinitePoset, name: &str) -> Result<Self, MeasureError> {
        let table = ExtensionTable::build(&poset, DEFAULT_STATE_BUDGET)?;
        let support = Arc::new(FiniteCauset::new(poset.clone(), name));
        Ok(Self { poset, table, support })
    }
}

fn step_weight(
    p: &FinitePoset,
    table: &ExtensionTable,
    stem: &[ElementId],
    x: ElementId,
) -> Result<Prob, MeasureError> {
    let bits = p.stem_bits(stem)?;
    let i = p.index_of(x)?;
    if bits.contains(i) || !p.below_bits(i).is_subset(&bits) {
        return Err(not_next(stem));
    }
    let mut next: FixedBitSet = bits.clone();
    next.insert(i);
    Ok(Prob::rational(ratio_of(table.completions(p, &next), table.completions(p, &bits))))
}

impl Measure for UniformFinite {
    fn name(&self) -> String {
        "uniform".into()
    }

    fn support(&self) -> &CausetRef {
        &self.support
    }

    fn grade(&self) -> Grade {
        Grade::ExactRational
    }

    fn weight(&self, stem: &[ElementId], x: ElementId) -> Result<Prob, MeasureError> {
        step_weight(&self.poset, &self.table, stem, x)
    }
}

/// Uniform measure on each summand of a linear sum, summand after summand.
pub struct StackedUniform {
    sum: Arc<LinearSum>,
    support: CausetRef,
    /// One table per summand of the period.
    tables: Vec<ExtensionTable>,
    period: usize,
}

impl StackedUniform {
    pub fn new(sum: LinearSum, period: usize) -> Result<Self, MeasureError> {
        let tables = (0..period as u64)
            .map(|k| ExtensionTable::build(sum.summand(k), DEFAULT_STATE_BUDGET))
            .collect::<Result<Vec<_>, _>>()?;
        let sum = Arc::new(sum);
        Ok(Self { support: sum.clone(), sum, tables, period })
    }
}

impl Measure for StackedUniform {
    fn name(&self) -> String {
        "stacked-uniform".into()
    }

    fn support(&self) -> &CausetRef {
        &self.support
    }

    fn grade(&self) -> Grade {
        Grade::ExactRational
    }

    fn weight(&self, stem: &[ElementId], x: ElementId) -> Result<Prob, MeasureError> {
        let k = self.sum.current_summand(stem);
        let (kx, ix) = self.sum.locate(x);
        if kx != k {
            return Err(not_next(stem));
        }
        let p = self.sum.summand(k);
        let local: Vec<ElementId> = stem
            .iter()
            .filter_map(|&y| {
                let (ky, iy) = self.sum.locate(y);
                (ky == k).then(|| p.id(iy))
            })
            .collect();
        step_weight(p, &self.tables[(k % self.period as u64) as usize], &local, p.id(ix))
    }
}
