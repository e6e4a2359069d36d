use std::collections::BTreeSet;

use super::{DegreeMap, GrowthError};
use crate::automaton::{Automaton, Run, StateId};
use crate::tree::{NodeAddress, Term};

/// Addresses where the run takes a transition whose target degree exceeds
/// the sum of its children's degrees.
pub fn critical_nodes(
    a: &Automaton,
    deg: &DegreeMap,
    t: &crate::tree::Tree,
    run: &Run,
) -> Result<BTreeSet<NodeAddress>, GrowthError> {
    a.run_weight(t, run)
        .map_err(|e| GrowthError::InvalidRun(e.to_string()))?;
    let mut out = BTreeSet::new();
    fn go(r: &Term<StateId>, deg: &DegreeMap, at: NodeAddress, out: &mut BTreeSet<NodeAddress>) {
        let below: u64 = r.children.iter().map(|c| deg.of(c.label)).sum();
        if deg.of(r.label) > below {
            out.insert(at.clone());
        }
        for (i, c) in r.children.iter().enumerate() {
            go(c, deg, at.child(i + 1), out);
        }
    }
    go(&run.0, deg, NodeAddress::root(), &mut out);
    Ok(out)
}
