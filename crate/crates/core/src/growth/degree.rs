use super::{heavy, BarbellSet, DegreeMap, GrowthError, Skeleton};
use crate::automaton::Automaton;

/// Least fixed point of
/// `f(q) = max(f(q), max Σ f(children), max over q' ⇛ q of f(q') + 1)`
/// from `f ≡ 0`, updating all states from the previous round.
pub(crate) fn iterate(sk: &Skeleton, barbells: &BarbellSet) -> Result<DegreeMap, GrowthError> {
    let a = sk.a;
    let n = a.state_count();
    let mut deg = vec![0u64; n];
    let mut settled = vec![0usize; n];
    let mut round = 0;
    loop {
        round += 1;
        if round > n + 1 {
            return Err(GrowthError::HeavyCyclePresent);
        }
        let mut next = deg.clone();
        for t in a.transitions() {
            let mut s = 0u64;
            for c in &t.children {
                s = s.checked_add(deg[c.index()]).ok_or(GrowthError::DegreeOverflow)?;
            }
            let slot = &mut next[t.target.index()];
            *slot = (*slot).max(s);
        }
        for &(q1, q2) in &barbells.pairs {
            let v = deg[q1.index()].checked_add(1).ok_or(GrowthError::DegreeOverflow)?;
            let slot = &mut next[q2.index()];
            *slot = (*slot).max(v);
        }
        if next == deg {
            break;
        }
        for q in 0..n {
            if next[q] != deg[q] {
                settled[q] = round;
            }
        }
        deg = next;
    }
    Ok(DegreeMap {
        deg,
        iterations: round,
        settled,
    })
}

/// State degrees of a trim automaton without heavy cycles.
pub fn degrees(a: &Automaton, barbells: &BarbellSet) -> Result<DegreeMap, GrowthError> {
    let sk = Skeleton::new(a)?;
    if heavy::find(&sk).is_some() {
        return Err(GrowthError::HeavyCyclePresent);
    }
    iterate(&sk, barbells)
}
