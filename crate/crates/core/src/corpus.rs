//! Named automata and seeded random generators.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{Automaton, StateId};
use crate::tree::{RankedAlphabet, SymbolId, Term, Tree};

/// `{ a:2 b:1 c:0 }`.
pub fn abc() -> RankedAlphabet {
    RankedAlphabet::new([("a", 2), ("b", 1), ("c", 0)]).expect("valid alphabet")
}

fn sym(al: &RankedAlphabet, name: &str) -> SymbolId {
    al.lookup(name).expect("letter present")
}

/// The tower of height `n` over `{ a:2 b:1 c:0 }`:
/// `c → q'`, `q' -b-> q'`, `q' -b-> qn`, `qn -b-> qn` and
/// `(qi, qi) -a-> q(i-1)` for `i = n..1`, accepting `q0`. Its ambiguity has
/// degree `2^n`.
pub fn tower(n: usize) -> Automaton {
    let al = abc();
    let (a, b, c) = (sym(&al, "a"), sym(&al, "b"), sym(&al, "c"));
    let mut aut = Automaton::new(al);
    let qp = aut.state("q'");
    let qs: Vec<StateId> = (0..=n).rev().map(|i| aut.state(&format!("q{i}"))).collect();
    // qs[0] = qn, qs[n] = q0
    let top = qs[0];
    aut.add_transition(vec![], c, qp, 1).expect("fresh");
    aut.add_transition(vec![qp], b, qp, 1).expect("fresh");
    aut.add_transition(vec![qp], b, top, 1).expect("fresh");
    aut.add_transition(vec![top], b, top, 1).expect("fresh");
    for w in qs.windows(2) {
        aut.add_transition(vec![w[0], w[0]], a, w[1], 1).expect("fresh");
    }
    aut.set_accepting(qs[n], 1).expect("state exists");
    aut
}

/// A chain over `{ b:1 c:0 }`: `c → q0`, each `qi` loops on `b` and steps to
/// `q(i+1)`, accepting the last state. Polynomial of degree `n - 1`; with
/// `heavy` the last loop has weight 2 and the growth is exponential.
pub fn loop_chain(n: usize, heavy: bool) -> Automaton {
    assert!(n >= 1);
    let al = RankedAlphabet::new([("b", 1), ("c", 0)]).expect("valid alphabet");
    let (b, c) = (sym(&al, "b"), sym(&al, "c"));
    let mut aut = Automaton::new(al);
    let qs: Vec<StateId> = (0..n).map(|i| aut.state(&format!("q{i}"))).collect();
    aut.add_transition(vec![], c, qs[0], 1).expect("fresh");
    for i in 0..n {
        let w = if heavy && i + 1 == n { 2 } else { 1 };
        aut.add_transition(vec![qs[i]], b, qs[i], w).expect("fresh");
        if i + 1 < n {
            aut.add_transition(vec![qs[i]], b, qs[i + 1], 1).expect("fresh");
        }
    }
    aut.set_accepting(qs[n - 1], 1).expect("state exists");
    aut
}

/// A chain over `{ a:2 b:1 c:0 }` without loops: `qi -b-> q(i+1)`, plus
/// `(q(i+1), qi) -a-> q(i+1)` on every third state so the pair and triple
/// graphs are not trivial. Unambiguous, hence of degree 0; with `heavy` a
/// weight-2 loop is added at the last state.
pub fn tree_chain(n: usize, heavy: bool) -> Automaton {
    assert!(n >= 1);
    let al = abc();
    let (a, b, c) = (sym(&al, "a"), sym(&al, "b"), sym(&al, "c"));
    let mut aut = Automaton::new(al);
    let qs: Vec<StateId> = (0..n).map(|i| aut.state(&format!("q{i}"))).collect();
    aut.add_transition(vec![], c, qs[0], 1).expect("fresh");
    for i in 0..n.saturating_sub(1) {
        aut.add_transition(vec![qs[i]], b, qs[i + 1], 1).expect("fresh");
        if i % 3 == 0 {
            aut.add_transition(vec![qs[i], qs[0]], a, qs[i + 1], 1).expect("fresh");
        }
    }
    if heavy {
        aut.add_transition(vec![qs[n - 1]], b, qs[n - 1], 2).expect("fresh");
    }
    aut.set_accepting(qs[n - 1], 1).expect("state exists");
    aut
}

/// Parameters of [`random_automaton`].
#[derive(Clone, Copy, Debug)]
pub struct RandomParams {
    pub max_states: usize,
    /// Transitions drawn for each rank 0, 1, 2, ..., at most; ranks past
    /// the end use the last entry.
    pub max_per_rank: [usize; 3],
    /// Probability that a transition has weight 2 instead of 1.
    pub heavy_weight: f64,
    /// Probability of planting `p -b-> p`, `p -b-> q`, `q -b-> q` on two
    /// random states, which yields a barbell unless it creates a heavy cycle.
    pub plant_barbell: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            max_states: 4,
            max_per_rank: [2, 5, 2],
            heavy_weight: 0.15,
            plant_barbell: 0.5,
        }
    }
}

/// A random automaton over `{ a:2 b:1 c:0 }` with weights in `{1, 2}`.
/// Not necessarily trim.
pub fn random_automaton(rng: &mut impl Rng, p: &RandomParams) -> Automaton {
    let al = abc();
    let letters: Vec<SymbolId> = al.ids().collect();
    let mut aut = Automaton::new(al.clone());
    let n = rng.random_range(1..=p.max_states);
    let qs: Vec<StateId> = (0..n).map(|i| aut.state(&format!("q{i}"))).collect();
    for &l in &letters {
        let rank = al.rank(l);
        let lo = usize::from(rank == 0);
        let cap = p.max_per_rank[rank.min(p.max_per_rank.len() - 1)];
        let count = rng.random_range(lo..=cap.max(lo));
        for _ in 0..count {
            let children: Vec<StateId> = (0..rank).map(|_| *qs.choose(rng).expect("nonempty")).collect();
            let target = *qs.choose(rng).expect("nonempty");
            let weight = if rng.random_bool(p.heavy_weight) { 2 } else { 1 };
            // duplicates are simply skipped
            let _ = aut.add_transition(children, l, target, weight);
        }
    }
    if n >= 2 && rng.random_bool(p.plant_barbell) {
        let b = al.ids().find(|&l| al.rank(l) == 1).expect("unary letter");
        let p1 = *qs.choose(rng).expect("nonempty");
        let p2 = *qs
            .iter()
            .filter(|&&q| q != p1)
            .collect::<Vec<_>>()
            .choose(rng)
            .expect("two states");
        for (x, y) in [(p1, p1), (p1, *p2), (*p2, *p2)] {
            let _ = aut.add_transition(vec![x], b, y, 1);
        }
    }
    let mut any = false;
    for &q in &qs {
        if rng.random_bool(0.4) {
            aut.set_accepting(q, 1).expect("state exists");
            any = true;
        }
    }
    if !any {
        aut.set_accepting(*qs.choose(rng).expect("nonempty"), 1)
            .expect("state exists");
    }
    aut
}

/// `count` automata from one seed.
pub fn random_corpus(seed: u64, count: usize, p: &RandomParams) -> Vec<Automaton> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_automaton(&mut rng, p)).collect()
}

/// A uniformly shaped random tree with at most `max_size` nodes. The
/// alphabet needs a rank-0 letter.
pub fn random_tree(rng: &mut impl Rng, al: &RankedAlphabet, max_size: usize) -> Tree {
    let leaves: Vec<SymbolId> = al.ids().filter(|&s| al.rank(s) == 0).collect();
    assert!(!leaves.is_empty(), "alphabet without leaves");
    let budget = rng.random_range(1..=max_size.max(1));
    grow(rng, al, &leaves, budget)
}

fn grow(rng: &mut impl Rng, al: &RankedAlphabet, leaves: &[SymbolId], budget: usize) -> Tree {
    let fitting: Vec<SymbolId> = al.ids().filter(|&s| al.rank(s) > 0 && al.rank(s) < budget).collect();
    if fitting.is_empty() || rng.random_bool(0.2) {
        return Term::leaf(*leaves.choose(rng).expect("nonempty"));
    }
    let s = *fitting.choose(rng).expect("nonempty");
    let r = al.rank(s);
    // split budget - 1 among r children, each at least 1
    let mut rest = budget - 1 - r;
    let mut children = Vec::with_capacity(r);
    for k in 0..r {
        let extra = if k + 1 == r { rest } else { rng.random_range(0..=rest) };
        rest -= extra;
        children.push(grow(rng, al, leaves, 1 + extra));
    }
    Term::node(s, children)
}
