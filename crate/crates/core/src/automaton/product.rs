use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use super::{Automaton, AutomatonError, StateId};
use crate::horn::{Demand, Derivations};
use crate::tree::{SymbolId, Tree};

/// Product automaton `A × B`. The state `(q, p)` has id `q·|B| + p`.
#[derive(Clone, Debug)]
pub struct Product {
    pub automaton: Automaton,
    pub pairs: Vec<(StateId, StateId)>,
    width: usize,
}

impl Product {
    pub fn id(&self, q: StateId, p: StateId) -> StateId {
        StateId((q.index() * self.width + p.index()) as u32)
    }
}

/// Weights are dropped and no state is accepting.
pub fn product(a: &Automaton, b: &Automaton) -> Result<Product, AutomatonError> {
    if a.alphabet() != b.alphabet() {
        return Err(AutomatonError::AlphabetMismatch);
    }
    let mut out = Automaton::new(a.alphabet().clone());
    let mut pairs = Vec::with_capacity(a.state_count() * b.state_count());
    for q in a.states() {
        for p in b.states() {
            out.add_state(format!("({},{})", a.state_name(q), b.state_name(p)))?;
            pairs.push((q, p));
        }
    }
    let nb = b.state_count();
    let pid = |q: StateId, p: StateId| StateId((q.index() * nb + p.index()) as u32);
    let b_by_letter = b.by_letter();
    for t in a.transitions() {
        for &ui in &b_by_letter[t.letter.index()] {
            let u = &b.transitions()[ui as usize];
            let children = t.children.iter().zip(&u.children).map(|(&q, &p)| pid(q, p)).collect();
            out.add_transition(children, t.letter, pid(t.target, u.target), 1)?;
        }
    }
    Ok(Product {
        automaton: out,
        pairs,
        width: nb,
    })
}

/// Pairs `(q, q')` such that a single tree has a run to `q` and one to `q'`.
pub fn pair_accessible(a: &Automaton) -> BTreeSet<(StateId, StateId)> {
    let p = product(a, a).expect("same alphabet");
    let acc = p.automaton.accessible_mask();
    p.pairs
        .iter()
        .zip(acc)
        .filter(|(_, b)| *b)
        .map(|(&pair, _)| pair)
        .collect()
}

/// Accessibility of `K`-tuples in the `K`-fold product, explored backwards
/// from the tuples of interest only.
pub struct TupleAccess<const K: usize> {
    demand: Demand<[StateId; K]>,
    model: Vec<bool>,
    derivations: Option<Derivations>,
}

/// Transitions indexed by `(target, letter)`.
pub(crate) fn by_target_letter(a: &Automaton) -> FxHashMap<(StateId, SymbolId), Vec<u32>> {
    let mut m: FxHashMap<(StateId, SymbolId), Vec<u32>> = FxHashMap::default();
    for (i, t) in a.transitions().iter().enumerate() {
        m.entry((t.target, t.letter)).or_default().push(i as u32);
    }
    m
}

impl<const K: usize> TupleAccess<K> {
    pub fn explore(a: &Automaton, goals: impl IntoIterator<Item = [StateId; K]>) -> Self {
        let by_target = a.by_target();
        let index = by_target_letter(a);
        let trs = a.transitions();
        let empty: Vec<u32> = Vec::new();
        let demand = Demand::explore(goals, |tuple: &[StateId; K], emit| {
            for &t0 in &by_target[tuple[0].index()] {
                let letter = trs[t0 as usize].letter;
                let lists: Vec<&Vec<u32>> = (1..K)
                    .map(|k| index.get(&(tuple[k], letter)).unwrap_or(&empty))
                    .collect();
                if lists.iter().any(|l| l.is_empty()) {
                    continue;
                }
                let rank = trs[t0 as usize].children.len();
                let mut pick = vec![0usize; K - 1];
                let mut body: Vec<[StateId; K]> = Vec::with_capacity(rank);
                loop {
                    body.clear();
                    for j in 0..rank {
                        let mut child = [StateId(0); K];
                        child[0] = trs[t0 as usize].children[j];
                        for k in 1..K {
                            child[k] = trs[lists[k - 1][pick[k - 1]] as usize].children[j];
                        }
                        body.push(child);
                    }
                    emit(letter.0, &body);
                    let mut k = 0;
                    while k < K - 1 {
                        pick[k] += 1;
                        if pick[k] < lists[k].len() {
                            break;
                        }
                        pick[k] = 0;
                        k += 1;
                    }
                    if k == K - 1 {
                        break;
                    }
                }
            }
        });
        let model = demand.least_model();
        TupleAccess {
            demand,
            model,
            derivations: None,
        }
    }

    /// Whether the tuple is accessible. Tuples outside the explored region
    /// (neither goals nor reachable backwards from them) report `false`.
    pub fn accessible(&self, tuple: &[StateId; K]) -> bool {
        self.demand.id(tuple).is_some_and(|id| self.model[id as usize])
    }

    pub fn explored(&self) -> usize {
        self.demand.len()
    }

    /// A smallest tree with, for each `k`, a run reaching `tuple[k]`.
    pub fn witness(&mut self, tuple: &[StateId; K]) -> Option<Tree> {
        let id = self.demand.id(tuple)?;
        if !self.model[id as usize] {
            return None;
        }
        let d = self.derivations.get_or_insert_with(|| self.demand.min_derivations());
        d.tree(id, self.demand.rules()).map(|t| t.map(&mut |&l| SymbolId(l)))
    }

    pub fn witness_size(&mut self, tuple: &[StateId; K]) -> Option<u64> {
        let id = self.demand.id(tuple)?;
        let d = self.derivations.get_or_insert_with(|| self.demand.min_derivations());
        d.size(id)
    }
}
