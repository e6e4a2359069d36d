//! Propositional Horn clauses: linear-time least models, minimal derivations
//! and demand-driven rule generation.
//!
//! Atoms are dense `u32` indices. A rule `head <- body` carries a `label`
//! (for automata, the letter of the transition it came from) so that a
//! derivation of an atom can be read back as a tree.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::tree::Term;

#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    heads: Vec<u32>,
    labels: Vec<u32>,
    starts: Vec<u32>,
    body: Vec<u32>,
}

impl RuleSet {
    pub fn new() -> Self {
        RuleSet {
            starts: vec![0],
            ..Default::default()
        }
    }

    pub fn push(&mut self, head: u32, label: u32, body: &[u32]) {
        self.heads.push(head);
        self.labels.push(label);
        self.body.extend_from_slice(body);
        self.starts.push(self.body.len() as u32);
    }

    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    pub fn head(&self, r: usize) -> u32 {
        self.heads[r]
    }

    pub fn label(&self, r: usize) -> u32 {
        self.labels[r]
    }

    pub fn body(&self, r: usize) -> &[u32] {
        &self.body[self.starts[r] as usize..self.starts[r + 1] as usize]
    }

    /// For each atom, the rules in whose body it occurs (with multiplicity).
    fn occurrences(&self, n_atoms: usize) -> (Vec<u32>, Vec<u32>) {
        let mut start = vec![0u32; n_atoms + 1];
        for &a in &self.body {
            start[a as usize + 1] += 1;
        }
        for i in 0..n_atoms {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut occ = vec![0u32; self.body.len()];
        for r in 0..self.len() {
            for &a in self.body(r) {
                occ[fill[a as usize] as usize] = r as u32;
                fill[a as usize] += 1;
            }
        }
        (start, occ)
    }
}

/// Least model by unit propagation: every rule keeps a counter of body atoms
/// not yet derived and fires when it reaches zero.
pub fn least_model(n_atoms: usize, rules: &RuleSet) -> Vec<bool> {
    let (start, occ) = rules.occurrences(n_atoms);
    let mut missing: Vec<u32> = (0..rules.len()).map(|r| rules.body(r).len() as u32).collect();
    let mut truth = vec![false; n_atoms];
    let mut queue = Vec::new();
    for r in (0..rules.len()).filter(|&r| rules.body(r).is_empty()) {
        let h = rules.head(r) as usize;
        if !truth[h] {
            truth[h] = true;
            queue.push(h as u32);
        }
    }
    while let Some(a) = queue.pop() {
        for &r in &occ[start[a as usize] as usize..start[a as usize + 1] as usize] {
            let r = r as usize;
            missing[r] -= 1;
            if missing[r] == 0 {
                let h = rules.head(r) as usize;
                if !truth[h] {
                    truth[h] = true;
                    queue.push(h as u32);
                }
            }
        }
    }
    truth
}

/// Smallest derivation trees, where the size of a derivation is its number
/// of rule applications.
#[derive(Clone, Debug)]
pub struct Derivations {
    size: Vec<u64>,
    rule: Vec<u32>,
}

const UNDERIVABLE: u64 = u64::MAX;

/// Knuth's generalisation of Dijkstra's algorithm to Horn rules with cost
/// `1 + sum of body costs`. Ties are broken by atom index, then rule order.
pub fn min_derivations(n_atoms: usize, rules: &RuleSet) -> Derivations {
    let (start, occ) = rules.occurrences(n_atoms);
    let mut missing: Vec<u32> = (0..rules.len()).map(|r| rules.body(r).len() as u32).collect();
    let mut acc = vec![1u64; rules.len()];
    let mut size = vec![UNDERIVABLE; n_atoms];
    let mut rule = vec![u32::MAX; n_atoms];
    let mut done = vec![false; n_atoms];
    let mut heap = BinaryHeap::new();
    for r in (0..rules.len()).filter(|&r| rules.body(r).is_empty()) {
        let h = rules.head(r) as usize;
        if 1 < size[h] {
            size[h] = 1;
            rule[h] = r as u32;
            heap.push(Reverse((1u64, h as u32)));
        }
    }
    while let Some(Reverse((cost, a))) = heap.pop() {
        let a = a as usize;
        if done[a] || cost != size[a] {
            continue;
        }
        done[a] = true;
        for &r in &occ[start[a] as usize..start[a + 1] as usize] {
            let r = r as usize;
            missing[r] -= 1;
            acc[r] = acc[r].saturating_add(cost);
            if missing[r] == 0 {
                let h = rules.head(r) as usize;
                if !done[h] && acc[r] < size[h] {
                    size[h] = acc[r];
                    rule[h] = r as u32;
                    heap.push(Reverse((acc[r], h as u32)));
                }
            }
        }
    }
    Derivations { size, rule }
}

impl Derivations {
    pub fn derivable(&self, atom: u32) -> bool {
        self.size[atom as usize] != UNDERIVABLE
    }

    /// Size of the smallest derivation, saturating at `u64::MAX - 1`.
    pub fn size(&self, atom: u32) -> Option<u64> {
        let s = self.size[atom as usize];
        (s != UNDERIVABLE).then_some(s)
    }

    pub fn rule(&self, atom: u32) -> Option<usize> {
        self.derivable(atom).then(|| self.rule[atom as usize] as usize)
    }

    /// The smallest derivation of `atom` as a tree of rule labels.
    pub fn tree(&self, atom: u32, rules: &RuleSet) -> Option<Term<u32>> {
        let mut memo = FxHashMap::default();
        self.derivable(atom).then(|| self.build(atom, rules, &mut memo))
    }

    fn build(&self, atom: u32, rules: &RuleSet, memo: &mut FxHashMap<u32, Term<u32>>) -> Term<u32> {
        if let Some(t) = memo.get(&atom) {
            return t.clone();
        }
        let r = self.rule[atom as usize] as usize;
        let children = rules.body(r).iter().map(|&b| self.build(b, rules, memo)).collect();
        let t = Term::node(rules.label(r), children);
        memo.insert(atom, t.clone());
        t
    }
}

/// Rules generated on demand, backwards from a set of goal atoms.
///
/// `expand(k, emit)` must call `emit(label, body)` once per rule whose head
/// is `k`; body atoms are interned and expanded in turn.
pub struct Demand<K> {
    keys: Vec<K>,
    index: FxHashMap<K, u32>,
    rules: RuleSet,
}

impl<K: Hash + Eq + Clone> Demand<K> {
    pub fn explore<I, F>(goals: I, mut expand: F) -> Self
    where
        I: IntoIterator<Item = K>,
        F: FnMut(&K, &mut dyn FnMut(u32, &[K])),
    {
        let mut keys: Vec<K> = Vec::new();
        let mut index: FxHashMap<K, u32> = FxHashMap::default();
        let mut rules = RuleSet::new();
        for g in goals {
            if !index.contains_key(&g) {
                index.insert(g.clone(), keys.len() as u32);
                keys.push(g);
            }
        }
        let mut next = 0;
        let mut ids = Vec::new();
        while next < keys.len() {
            let k = keys[next].clone();
            let head = next as u32;
            expand(&k, &mut |label, body| {
                ids.clear();
                for b in body {
                    let id = match index.get(b) {
                        Some(&id) => id,
                        None => {
                            let id = keys.len() as u32;
                            index.insert(b.clone(), id);
                            keys.push(b.clone());
                            id
                        }
                    };
                    ids.push(id);
                }
                rules.push(head, label, &ids);
            });
            next += 1;
        }
        Demand { keys, index, rules }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn id(&self, k: &K) -> Option<u32> {
        self.index.get(k).copied()
    }

    pub fn key(&self, id: u32) -> &K {
        &self.keys[id as usize]
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn least_model(&self) -> Vec<bool> {
        least_model(self.keys.len(), &self.rules)
    }

    pub fn min_derivations(&self) -> Derivations {
        min_derivations(self.keys.len(), &self.rules)
    }
}
