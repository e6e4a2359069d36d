//! ℕ-weighted bottom-up tree automata.

mod ambiguity;
mod format;
mod product;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::graph::Digraph;
use crate::horn::{least_model, min_derivations, Derivations, RuleSet};
use crate::tree::{Context, RankedAlphabet, Slot, SymbolId, Term, Tree};

pub(crate) use ambiguity::Ambiguity;
pub use ambiguity::{ambiguous_states, ambiguous_witness};
pub use format::parse_automaton;
pub use product::{pair_accessible, product, Product, TupleAccess};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub children: Vec<StateId>,
    pub letter: SymbolId,
    pub target: StateId,
    pub weight: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("unknown state id {0}")]
    UnknownState(u32),
    #[error("letter id {0} is not in the alphabet")]
    UnknownLetter(u32),
    #[error("letter `{letter}` has rank {expected} but the transition has {found} children")]
    RankMismatch {
        letter: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate transition into `{0}`")]
    DuplicateTransition(String),
    #[error("weights must be positive")]
    ZeroWeight,
    #[error("input is not over the automaton's alphabet")]
    AlphabetMismatch,
    #[error("invalid run: {0}")]
    InvalidRun(String),
}

type TransitionKey = (Vec<StateId>, SymbolId, StateId);

/// A weighted tree automaton. States and transitions keep insertion order,
/// which fixes every iteration order in the crate.
#[derive(Clone, Debug)]
pub struct Automaton {
    alphabet: RankedAlphabet,
    states: Vec<String>,
    state_index: FxHashMap<String, StateId>,
    transitions: Vec<Transition>,
    keys: FxHashMap<TransitionKey, u32>,
    accepting: BTreeMap<StateId, u64>,
}

impl PartialEq for Automaton {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.states == other.states
            && self.transitions == other.transitions
            && self.accepting == other.accepting
    }
}

impl Eq for Automaton {}

impl Automaton {
    pub fn new(alphabet: RankedAlphabet) -> Self {
        Automaton {
            alphabet,
            states: Vec::new(),
            state_index: FxHashMap::default(),
            transitions: Vec::new(),
            keys: FxHashMap::default(),
            accepting: BTreeMap::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> Result<StateId, AutomatonError> {
        let name = name.into();
        if self.state_index.contains_key(&name) {
            return Err(AutomatonError::DuplicateState(name));
        }
        let id = StateId(self.states.len() as u32);
        self.state_index.insert(name.clone(), id);
        self.states.push(name);
        Ok(id)
    }

    /// Returns the existing state of that name or creates it.
    pub fn state(&mut self, name: &str) -> StateId {
        match self.state_index.get(name) {
            Some(&q) => q,
            None => self.add_state(name).expect("fresh name"),
        }
    }

    pub fn add_transition(
        &mut self,
        children: Vec<StateId>,
        letter: SymbolId,
        target: StateId,
        weight: u64,
    ) -> Result<(), AutomatonError> {
        if !self.alphabet.contains(letter) {
            return Err(AutomatonError::UnknownLetter(letter.0));
        }
        let rank = self.alphabet.rank(letter);
        if rank != children.len() {
            return Err(AutomatonError::RankMismatch {
                letter: self.alphabet.name(letter).to_string(),
                expected: rank,
                found: children.len(),
            });
        }
        for &q in children.iter().chain(std::iter::once(&target)) {
            if q.index() >= self.states.len() {
                return Err(AutomatonError::UnknownState(q.0));
            }
        }
        if weight == 0 {
            return Err(AutomatonError::ZeroWeight);
        }
        let key = (children.clone(), letter, target);
        if self.keys.contains_key(&key) {
            return Err(AutomatonError::DuplicateTransition(self.states[target.index()].clone()));
        }
        self.keys.insert(key, self.transitions.len() as u32);
        self.transitions.push(Transition {
            children,
            letter,
            target,
            weight,
        });
        Ok(())
    }

    pub fn set_accepting(&mut self, q: StateId, weight: u64) -> Result<(), AutomatonError> {
        if q.index() >= self.states.len() {
            return Err(AutomatonError::UnknownState(q.0));
        }
        if weight == 0 {
            return Err(AutomatonError::ZeroWeight);
        }
        self.accepting.insert(q, weight);
        Ok(())
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition_index(&self, children: &[StateId], letter: SymbolId, target: StateId) -> Option<usize> {
        self.keys.get(&(children.to_vec(), letter, target)).map(|&i| i as usize)
    }

    pub fn accepting(&self) -> &BTreeMap<StateId, u64> {
        &self.accepting
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting.contains_key(&q)
    }

    /// Total size: states plus the lengths of all transitions.
    pub fn size(&self) -> usize {
        self.states.len() + self.transitions.iter().map(|t| t.children.len() + 2).sum::<usize>()
    }

    /// Same automaton with every weight (transitions and accepting) set to 1.
    pub fn unweighted(&self) -> Automaton {
        let mut a = self.clone();
        for t in &mut a.transitions {
            t.weight = 1;
        }
        for w in a.accepting.values_mut() {
            *w = 1;
        }
        a
    }

    /// Transition indices grouped by letter.
    pub fn by_letter(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.alphabet.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            out[t.letter.index()].push(i as u32);
        }
        out
    }

    /// Transition indices grouped by target state.
    pub fn by_target(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            out[t.target.index()].push(i as u32);
        }
        out
    }

    pub(crate) fn eval<'v, L>(
        &self,
        t: &Term<L>,
        leaf: &dyn Fn(&L) -> Leaf<'v>,
        unit: bool,
        by_letter: &[Vec<u32>],
    ) -> Vec<BigUint> {
        let a = match leaf(&t.label) {
            Leaf::Fixed(v) => return v.to_vec(),
            Leaf::Sym(a) => a,
        };
        let kids: Vec<Vec<BigUint>> = t.children.iter().map(|c| self.eval(c, leaf, unit, by_letter)).collect();
        let mut out = vec![BigUint::zero(); self.states.len()];
        'tr: for &ti in &by_letter[a.index()] {
            let tr = &self.transitions[ti as usize];
            let mut prod = if unit { BigUint::one() } else { BigUint::from(tr.weight) };
            for (k, q) in tr.children.iter().enumerate() {
                let v = &kids[k][q.index()];
                if v.is_zero() {
                    continue 'tr;
                }
                prod *= v;
            }
            out[tr.target.index()] += prod;
        }
        out
    }

    fn finish(&self, per_state: Vec<BigUint>, unit: bool) -> ValueVector {
        let mut accepting = BigUint::zero();
        for (&q, &w) in &self.accepting {
            let v = &per_state[q.index()];
            if unit {
                accepting += v;
            } else {
                accepting += v * BigUint::from(w);
            }
        }
        ValueVector { per_state, accepting }
    }

    /// Bottom-up evaluation: the weighted sum of runs per root state.
    pub fn value(&self, t: &Tree) -> Result<ValueVector, AutomatonError> {
        self.value_impl(t, false)
    }

    /// Number of accepting runs on `t`.
    pub fn count_accepting_runs(&self, t: &Tree) -> Result<BigUint, AutomatonError> {
        Ok(self.value_impl(t, true)?.accepting)
    }

    fn value_impl(&self, t: &Tree, unit: bool) -> Result<ValueVector, AutomatonError> {
        if !self.alphabet.accepts(t) {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let by_letter = self.by_letter();
        let v = self.eval(t, &|s: &SymbolId| Leaf::Sym(*s), unit, &by_letter);
        Ok(self.finish(v, unit))
    }

    /// For each root state, the total weight of runs on `c` that have `from`
    /// at the hole.
    pub fn context_values(&self, c: &Context, from: StateId) -> Result<Vec<BigUint>, AutomatonError> {
        self.context_values_impl(c, from, false)
    }

    pub(crate) fn context_values_impl(
        &self,
        c: &Context,
        from: StateId,
        unit: bool,
    ) -> Result<Vec<BigUint>, AutomatonError> {
        if !context_over(&self.alphabet, c.term()) {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let mut unit_vec = vec![BigUint::zero(); self.states.len()];
        unit_vec[from.index()] = BigUint::one();
        let by_letter = self.by_letter();
        Ok(self.eval(
            c.term(),
            &|s: &Slot| match s {
                Slot::Hole => Leaf::Fixed(&unit_vec),
                Slot::Sym(a) => Leaf::Sym(*a),
            },
            unit,
            &by_letter,
        ))
    }

    /// Weighted sum of runs on `c` with `from` at the hole and `to` at the root.
    pub fn context_value(&self, c: &Context, from: StateId, to: StateId) -> Result<BigUint, AutomatonError> {
        Ok(self.context_values(c, from)?.swap_remove(to.index()))
    }

    /// Checks a run against `t` and returns its weight (product of
    /// transition weights, accepting weight excluded).
    pub fn run_weight(&self, t: &Tree, run: &Run) -> Result<BigUint, AutomatonError> {
        fn go(a: &Automaton, t: &Tree, r: &Term<StateId>, acc: &mut BigUint) -> Result<(), AutomatonError> {
            if r.children.len() != t.children.len() {
                return Err(AutomatonError::InvalidRun("run does not match the tree shape".into()));
            }
            let kids: Vec<StateId> = r.children.iter().map(|c| c.label).collect();
            match a.transition_index(&kids, t.label, r.label) {
                Some(i) => *acc *= BigUint::from(a.transitions[i].weight),
                None => {
                    return Err(AutomatonError::InvalidRun(format!(
                        "no transition into `{}` on `{}`",
                        a.state_name(r.label),
                        a.alphabet.name(t.label)
                    )))
                }
            }
            for (tc, rc) in t.children.iter().zip(&r.children) {
                go(a, tc, rc, acc)?;
            }
            Ok(())
        }
        if !self.alphabet.accepts(t) {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let mut w = BigUint::one();
        go(self, t, &run.0, &mut w)?;
        Ok(w)
    }

    /// Horn rules with one atom per state and one rule per transition.
    pub(crate) fn horn_rules(&self) -> RuleSet {
        let mut rules = RuleSet::new();
        let mut body = Vec::new();
        for t in &self.transitions {
            body.clear();
            body.extend(t.children.iter().map(|q| q.0));
            rules.push(t.target.0, t.letter.0, &body);
        }
        rules
    }

    /// States reachable at the root of some run.
    pub fn accessible_states(&self) -> BTreeSet<StateId> {
        self.accessible_mask()
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| StateId(i as u32))
            .collect()
    }

    pub(crate) fn accessible_mask(&self) -> Vec<bool> {
        least_model(self.states.len(), &self.horn_rules())
    }

    pub fn shallow_digraph(&self) -> ShallowDigraph {
        self.shallow_digraph_with(&self.accessible_mask())
    }

    pub(crate) fn shallow_digraph_with(&self, accessible: &[bool]) -> ShallowDigraph {
        let mut edges = Vec::new();
        let mut labels = Vec::new();
        for (ti, t) in self.transitions.iter().enumerate() {
            let blocked: Vec<usize> = (0..t.children.len())
                .filter(|&i| !accessible[t.children[i].index()])
                .collect();
            let hole_positions: Vec<usize> = match blocked.len() {
                0 => (0..t.children.len()).collect(),
                1 => blocked,
                _ => Vec::new(),
            };
            for i in hole_positions {
                edges.push((t.children[i].0, t.target.0));
                labels.push(ShallowEdge {
                    from: t.children[i],
                    to: t.target,
                    transition: ti,
                    index: i + 1,
                });
            }
        }
        ShallowDigraph {
            graph: Digraph::new(self.states.len(), &edges),
            edges: labels,
        }
    }

    /// States from which an accepting state is reachable in the shallow digraph.
    pub fn coaccessible_states(&self) -> BTreeSet<StateId> {
        mask_to_set(&self.coaccessible_mask(&self.shallow_digraph()))
    }

    pub(crate) fn coaccessible_mask(&self, g: &ShallowDigraph) -> Vec<bool> {
        g.graph.reversed().reachable(self.accepting.keys().map(|q| q.index()))
    }

    pub fn is_trim(&self) -> bool {
        let acc = self.accessible_mask();
        if acc.iter().any(|&b| !b) {
            return false;
        }
        let g = self.shallow_digraph_with(&acc);
        self.coaccessible_mask(&g).iter().all(|&b| b)
    }

    pub fn trim(&self) -> Automaton {
        self.trim_with_map().0
    }

    /// Trimmed automaton plus, for each original state, its new id if kept.
    pub fn trim_with_map(&self) -> (Automaton, Vec<Option<StateId>>) {
        let acc = self.accessible_mask();
        let g = self.shallow_digraph_with(&acc);
        let co = self.coaccessible_mask(&g);
        let keep: Vec<bool> = acc.iter().zip(&co).map(|(a, c)| *a && *c).collect();
        self.restrict(&keep)
    }

    /// Keeps the marked states and the transitions among them.
    pub(crate) fn restrict(&self, keep: &[bool]) -> (Automaton, Vec<Option<StateId>>) {
        let mut out = Automaton::new(self.alphabet.clone());
        let mut map = vec![None; self.states.len()];
        for (i, name) in self.states.iter().enumerate() {
            if keep[i] {
                map[i] = Some(out.add_state(name.clone()).expect("distinct names"));
            }
        }
        for t in &self.transitions {
            let Some(target) = map[t.target.index()] else { continue };
            let children: Option<Vec<StateId>> = t.children.iter().map(|q| map[q.index()]).collect();
            if let Some(children) = children {
                out.add_transition(children, t.letter, target, t.weight)
                    .expect("restriction of a valid automaton");
            }
        }
        for (&q, &w) in &self.accepting {
            if let Some(nq) = map[q.index()] {
                out.set_accepting(nq, w).expect("kept state");
            }
        }
        (out, map)
    }

    /// Smallest trees reaching each state.
    pub fn min_trees(&self) -> MinTrees {
        let rules = self.horn_rules();
        MinTrees {
            derivations: min_derivations(self.states.len(), &rules),
            rules,
        }
    }
}

pub(crate) enum Leaf<'a> {
    Sym(SymbolId),
    Fixed(&'a [BigUint]),
}

fn context_over(alphabet: &RankedAlphabet, t: &Term<Slot>) -> bool {
    match t.label {
        Slot::Hole => t.children.is_empty(),
        Slot::Sym(a) => {
            alphabet.contains(a)
                && alphabet.rank(a) == t.children.len()
                && t.children.iter().all(|c| context_over(alphabet, c))
        }
    }
}

pub(crate) fn mask_to_set(mask: &[bool]) -> BTreeSet<StateId> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| StateId(i as u32))
        .collect()
}

/// Per-state smallest accessibility witnesses.
pub struct MinTrees {
    derivations: Derivations,
    rules: RuleSet,
}

impl MinTrees {
    pub fn size(&self, q: StateId) -> Option<u64> {
        self.derivations.size(q.0)
    }

    pub fn tree(&self, q: StateId) -> Option<Tree> {
        self.derivations
            .tree(q.0, &self.rules)
            .map(|t| t.map(&mut |&l| SymbolId(l)))
    }
}

/// Values of an automaton on a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueVector {
    pub per_state: Vec<BigUint>,
    pub accepting: BigUint,
}

impl ValueVector {
    pub fn of(&self, q: StateId) -> &BigUint {
        &self.per_state[q.index()]
    }
}

/// A run, stored as a tree of states with the shape of its input.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Run(pub Term<StateId>);

impl Run {
    pub fn root(&self) -> StateId {
        self.0.label
    }

    pub fn state_at(&self, address: &crate::tree::NodeAddress) -> Option<StateId> {
        self.0.subterm(address).map(|t| t.label)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShallowEdge {
    pub from: StateId,
    pub to: StateId,
    pub transition: usize,
    /// 1-based position of the hole.
    pub index: usize,
}

/// `q' -> q` whenever some shallow context takes `q'` at the hole to `q` at
/// the root. Edge ids of `graph` index into `edges`.
#[derive(Clone, Debug)]
pub struct ShallowDigraph {
    pub graph: Digraph,
    pub edges: Vec<ShallowEdge>,
}

impl ShallowDigraph {
    pub fn edge_set(&self) -> BTreeSet<(StateId, StateId)> {
        self.edges.iter().map(|e| (e.from, e.to)).collect()
    }
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format::write_automaton(self, f)
    }
}

#[cfg(test)]
mod tests;
