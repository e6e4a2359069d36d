//! Ambiguous states through a pair/`#` product.
//!
//! `Pair(p, p')` holds when one tree has a run to `p` and a run to `p'`.
//! `Sharp(q)` holds when one tree has two distinct runs to `q`: either the
//! root transitions differ (both into `q`, same letter, children pairwise
//! `Pair`), or they coincide and one child is itself `Sharp` while the other
//! children are merely accessible (`Pair(q_j, q_j)`).

use std::collections::BTreeSet;

use super::product::by_target_letter;
use super::{Automaton, StateId};
use crate::horn::{Demand, Derivations};
use crate::tree::{SymbolId, Tree};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Atom {
    Pair(StateId, StateId),
    Sharp(StateId),
}

pub(crate) struct Ambiguity {
    demand: Demand<Atom>,
    model: Vec<bool>,
    derivations: Option<Derivations>,
}

impl Ambiguity {
    pub(crate) fn explore(a: &Automaton, goals: impl IntoIterator<Item = StateId>) -> Self {
        let by_target = a.by_target();
        let index = by_target_letter(a);
        let trs = a.transitions();
        let demand = Demand::explore(goals.into_iter().map(Atom::Sharp), |atom, emit| {
            let mut body = Vec::new();
            match *atom {
                Atom::Pair(p, p2) => {
                    for &t1 in &by_target[p.index()] {
                        let t1 = &trs[t1 as usize];
                        let Some(list) = index.get(&(p2, t1.letter)) else {
                            continue;
                        };
                        for &t2 in list {
                            let t2 = &trs[t2 as usize];
                            body.clear();
                            body.extend(t1.children.iter().zip(&t2.children).map(|(&x, &y)| Atom::Pair(x, y)));
                            emit(t1.letter.0, &body);
                        }
                    }
                }
                Atom::Sharp(q) => {
                    let into = &by_target[q.index()];
                    for (k, &i1) in into.iter().enumerate() {
                        let t1 = &trs[i1 as usize];
                        for &i2 in &into[k + 1..] {
                            let t2 = &trs[i2 as usize];
                            if t2.letter != t1.letter {
                                continue;
                            }
                            body.clear();
                            body.extend(t1.children.iter().zip(&t2.children).map(|(&x, &y)| Atom::Pair(x, y)));
                            emit(t1.letter.0, &body);
                        }
                    }
                    for &i in into {
                        let t = &trs[i as usize];
                        for pos in 0..t.children.len() {
                            body.clear();
                            body.extend(t.children.iter().enumerate().map(|(j, &c)| {
                                if j == pos {
                                    Atom::Sharp(c)
                                } else {
                                    Atom::Pair(c, c)
                                }
                            }));
                            emit(t.letter.0, &body);
                        }
                    }
                }
            }
        });
        let model = demand.least_model();
        Ambiguity {
            demand,
            model,
            derivations: None,
        }
    }

    pub(crate) fn is_ambiguous(&self, q: StateId) -> bool {
        self.demand
            .id(&Atom::Sharp(q))
            .is_some_and(|id| self.model[id as usize])
    }

    /// A smallest tree with two distinct runs reaching `q`.
    pub(crate) fn witness(&mut self, q: StateId) -> Option<Tree> {
        let id = self.demand.id(&Atom::Sharp(q))?;
        if !self.model[id as usize] {
            return None;
        }
        let d = self.derivations.get_or_insert_with(|| self.demand.min_derivations());
        d.tree(id, self.demand.rules()).map(|t| t.map(&mut |&l| SymbolId(l)))
    }
}

/// States `q` such that some tree has two distinct runs with `q` at the root.
pub fn ambiguous_states(a: &Automaton) -> BTreeSet<StateId> {
    let amb = Ambiguity::explore(a, a.states());
    a.states().filter(|&q| amb.is_ambiguous(q)).collect()
}

/// A smallest tree with two distinct runs to `q`, if `q` is ambiguous.
pub fn ambiguous_witness(a: &Automaton, q: StateId) -> Option<Tree> {
    Ambiguity::explore(a, [q]).witness(q)
}
