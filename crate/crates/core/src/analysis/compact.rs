use std::collections::{BTreeSet, HashSet, VecDeque};

use super::{CheckReport, Tally};
use crate::exact::{Grade, Prob};
use crate::families::{label_stem, Causet};
use crate::poset::ElementId;

/// Search stems breadth-first for one whose complement has more than `k`
/// minimal elements, or infinitely many. A witness means the causet is not
/// compact and the report fails; exhausting the budget passes with a note.
pub fn compactness_witness(o: &dyn Causet, stem_budget: usize, k: usize) -> CheckReport {
    let mut tally = Tally::new("compactness", k, Grade::ExactRational);
    let mut seen: HashSet<BTreeSet<ElementId>> = HashSet::new();
    let mut queue: VecDeque<Vec<ElementId>> = VecDeque::from([Vec::new()]);
    let mut visited = 0;
    while let Some(stem) = queue.pop_front() {
        if visited >= stem_budget {
            break;
        }
        if !seen.insert(stem.iter().copied().collect()) {
            continue;
        }
        visited += 1;
        let m = o.minimal_after(&stem, k + 1);
        if !m.exhaustive || m.elems.len() > k {
            let what = if m.exhaustive { format!("{} minimal elements", m.elems.len()) } else { "infinitely many minimal elements".into() };
            tally.observe(Prob::one(), || format!("[{}]: {what}", label_stem(o, &stem)));
            break;
        }
        for &x in &m.elems {
            let mut next = stem.clone();
            next.push(x);
            queue.push_back(next);
        }
    }
    tally.note(format!("{visited} stems searched"));
    tally.finish()
}
