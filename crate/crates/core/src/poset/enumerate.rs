use fixedbitset::FixedBitSet;

use super::{ElementId, FinitePoset, PosetError};

/// Every linear extension of `p`, each exactly once, in lexicographic order
/// of element ids. Fails with `CapExceeded` once more than `cap` are found.
pub fn enumerate_extensions(p: &FinitePoset, cap: usize) -> Result<Vec<Vec<ElementId>>, PosetError> {
    let mut out = Vec::new();
    let mut seq = Vec::with_capacity(p.len());
    let mut members = FixedBitSet::with_capacity(p.len());
    extend(p, &mut members, &mut seq, &mut out, cap)?;
    Ok(out)
}

fn extend(
    p: &FinitePoset,
    members: &mut FixedBitSet,
    seq: &mut Vec<usize>,
    out: &mut Vec<Vec<ElementId>>,
    cap: usize,
) -> Result<(), PosetError> {
    if seq.len() == p.len() {
        if out.len() == cap {
            return Err(PosetError::CapExceeded { cap });
        }
        out.push(seq.iter().map(|&i| p.id(i)).collect());
        return Ok(());
    }
    for b in p.minimal_outside(members) {
        members.insert(b);
        seq.push(b);
        extend(p, members, seq, out, cap)?;
        seq.pop();
        members.set(b, false);
    }
    Ok(())
}
