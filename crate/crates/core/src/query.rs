//! Counting query results. An unambiguous automaton `A_F` over marked letters
//! `a@b1..bl` selects tuples of node sets; [`build_bf`] turns it into an
//! automaton over the plain letters whose number of accepting runs on `t` is
//! the number of selected tuples on `t`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::automaton::{ambiguous_states, pair_accessible, Automaton, AutomatonError, StateId};
use crate::growth::{analyze, GrowthReport};
use crate::tree::{NodeAddress, RankedAlphabet, SymbolId, Term, Tree};

/// Default limit on the number of mark coordinates.
pub const MAX_ARITY: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("mark arity {0} is outside 1..={MAX_ARITY}; the marked alphabet has |Σ|·2^l letters")]
    ArityOutOfRange(usize),
    #[error("letter `{0}` is not of the form name@bits")]
    NotMarked(String),
    #[error("letters disagree on the number of mark bits")]
    MixedArity,
    #[error("letter `{0}` appears with two ranks")]
    RankConflict(String),
    #[error("node {0} is not in the tree")]
    InvalidAddress(NodeAddress),
    #[error("expected {expected} node sets, found {found}")]
    WrongTupleLength { expected: usize, found: usize },
    #[error("the query automaton is ambiguous")]
    NotUnambiguous,
    #[error("too many markings to enumerate: {0}")]
    CapExceeded(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// `Σ × {0,1}^l`. The letter for `(a, bits)` has index `a·2^l + bits`, where
/// bit `k` of `bits` is coordinate `k + 1` and is spelled as the `k`-th
/// character after the `@`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedAlphabet {
    base: RankedAlphabet,
    arity: usize,
    marked: RankedAlphabet,
}

fn bit_string(bits: u32, arity: usize) -> String {
    (0..arity).map(|k| if bits >> k & 1 == 1 { '1' } else { '0' }).collect()
}

impl MarkedAlphabet {
    pub fn new(base: RankedAlphabet, arity: usize) -> Result<Self, QueryError> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(QueryError::ArityOutOfRange(arity));
        }
        let mut symbols = Vec::new();
        for s in base.ids() {
            for bits in 0..1u32 << arity {
                symbols.push((format!("{}@{}", base.name(s), bit_string(bits, arity)), base.rank(s)));
            }
        }
        let marked = RankedAlphabet::new(symbols).map_err(|e| QueryError::NotMarked(e.to_string()))?;
        Ok(MarkedAlphabet { base, arity, marked })
    }

    pub fn base(&self) -> &RankedAlphabet {
        &self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.marked
    }

    pub fn len(&self) -> usize {
        self.marked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marked.is_empty()
    }

    pub fn symbol(&self, a: SymbolId, bits: u32) -> SymbolId {
        SymbolId((a.0 << self.arity) | bits)
    }

    pub fn decode(&self, s: SymbolId) -> (SymbolId, u32) {
        (SymbolId(s.0 >> self.arity), s.0 & ((1 << self.arity) - 1))
    }
}

/// Reads an automaton whose letters are spelled `name@bits` as an automaton
/// over the full marked alphabet of the letters it mentions.
pub fn reinterpret(a: &Automaton) -> Result<(MarkedAlphabet, Automaton), QueryError> {
    let al = a.alphabet();
    let mut base: BTreeMap<String, usize> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut arity = None;
    let mut parsed = Vec::new();
    for s in al.ids() {
        let name = al.name(s);
        let (letter, bits) = name
            .rsplit_once('@')
            .filter(|(l, b)| !l.is_empty() && !b.is_empty() && b.chars().all(|c| c == '0' || c == '1'))
            .ok_or_else(|| QueryError::NotMarked(name.to_string()))?;
        if *arity.get_or_insert(bits.len()) != bits.len() {
            return Err(QueryError::MixedArity);
        }
        match base.get(letter) {
            Some(&r) if r != al.rank(s) => return Err(QueryError::RankConflict(letter.to_string())),
            Some(_) => {}
            None => {
                base.insert(letter.to_string(), al.rank(s));
                order.push(letter.to_string());
            }
        }
        let value = bits
            .chars()
            .enumerate()
            .fold(0u32, |v, (k, c)| v | (u32::from(c == '1') << k));
        parsed.push((letter.to_string(), value));
    }
    let arity = arity.ok_or(QueryError::ArityOutOfRange(0))?;
    let base_al = RankedAlphabet::new(order.iter().map(|l| (l.clone(), base[l])))
        .map_err(|e| QueryError::NotMarked(e.to_string()))?;
    let m = MarkedAlphabet::new(base_al, arity)?;
    let remap: Vec<SymbolId> = parsed
        .iter()
        .map(|(l, bits)| m.symbol(m.base.lookup(l).expect("collected"), *bits))
        .collect();
    let mut out = Automaton::new(m.marked.clone());
    for q in a.states() {
        out.add_state(a.state_name(q))?;
    }
    for t in a.transitions() {
        out.add_transition(t.children.clone(), remap[t.letter.index()], t.target, t.weight)?;
    }
    for (&q, &w) in a.accepting() {
        out.set_accepting(q, w)?;
    }
    Ok((m, out))
}

/// Labels node `v` with `(a, b)` where bit `k` of `b` says whether `v ∈ P_k`.
pub fn mark(m: &MarkedAlphabet, t: &Tree, sets: &[BTreeSet<NodeAddress>]) -> Result<Tree, QueryError> {
    if sets.len() != m.arity {
        return Err(QueryError::WrongTupleLength {
            expected: m.arity,
            found: sets.len(),
        });
    }
    for set in sets {
        if let Some(bad) = set.iter().find(|v| t.subterm(v).is_none()) {
            return Err(QueryError::InvalidAddress(bad.clone()));
        }
    }
    fn go(m: &MarkedAlphabet, t: &Tree, at: NodeAddress, sets: &[BTreeSet<NodeAddress>]) -> Tree {
        let bits = sets
            .iter()
            .enumerate()
            .fold(0u32, |v, (k, s)| v | (u32::from(s.contains(&at)) << k));
        let children = t
            .children
            .iter()
            .enumerate()
            .map(|(i, c)| go(m, c, at.child(i + 1), sets))
            .collect();
        Term::node(m.symbol(t.label, bits), children)
    }
    Ok(go(m, t, NodeAddress::root(), sets))
}

/// Drops the marks.
pub fn project(m: &MarkedAlphabet, t: &Tree) -> Tree {
    t.map(&mut |&s| m.decode(s).0)
}

/// Whether no tree has two accepting runs: no accepting state is ambiguous
/// and no two distinct accepting states are reached on a common tree.
pub fn check_unambiguous(a: &Automaton) -> bool {
    let amb = ambiguous_states(a);
    if a.accepting().keys().any(|q| amb.contains(q)) {
        return false;
    }
    let acc: Vec<StateId> = a.accepting().keys().copied().collect();
    if acc.len() < 2 {
        return true;
    }
    let pairs = pair_accessible(a);
    !acc.iter()
        .any(|&p| acc.iter().any(|&q| p != q && pairs.contains(&(p, q))))
}

/// States `(q, a, b)` named `q@a@bits`; for each transition
/// `(q1..qm, (a, b), q)` of `A_F` and all decorations of the children, the
/// transition `((q1, a1, b1), .., (qm, am, bm), a, (q, a, b))`. All weights
/// are 1 and `(q, a, b)` accepts iff `q` does.
pub fn build_bf(m: &MarkedAlphabet, a_f: &Automaton) -> Result<Automaton, QueryError> {
    if a_f.alphabet() != &m.marked {
        return Err(AutomatonError::AlphabetMismatch.into());
    }
    if !check_unambiguous(a_f) {
        return Err(QueryError::NotUnambiguous);
    }
    let decorations = m.marked.len();
    let mut b = Automaton::new(m.base.clone());
    for q in a_f.states() {
        for d in 0..decorations {
            let (letter, bits) = m.decode(SymbolId(d as u32));
            b.add_state(format!(
                "{}@{}@{}",
                a_f.state_name(q),
                m.base.name(letter),
                bit_string(bits, m.arity)
            ))?;
        }
    }
    let sid = |q: StateId, d: usize| StateId((q.index() * decorations + d) as u32);
    for t in a_f.transitions() {
        let (letter, _) = m.decode(t.letter);
        let target = sid(t.target, t.letter.index());
        let rank = t.children.len();
        let mut pick = vec![0usize; rank];
        loop {
            let children = t.children.iter().zip(&pick).map(|(&q, &d)| sid(q, d)).collect();
            b.add_transition(children, letter, target, 1)?;
            let mut k = 0;
            while k < rank {
                pick[k] += 1;
                if pick[k] < decorations {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
            if k == rank {
                break;
            }
        }
    }
    for &q in a_f.accepting().keys() {
        for d in 0..decorations {
            b.set_accepting(sid(q, d), 1)?;
        }
    }
    Ok(b)
}

/// Growth of the number of query results.
pub fn query_growth(m: &MarkedAlphabet, a_f: &Automaton) -> Result<GrowthReport, QueryError> {
    Ok(analyze(&build_bf(m, a_f)?))
}

/// Markings are enumerated only up to this many.
pub const MARKING_CAP: u64 = 1 << 22;

/// Number of tuples `P` with `mark(t, P)` accepted, by trying all of them.
pub fn count_results_brute(m: &MarkedAlphabet, a_f: &Automaton, t: &Tree) -> Result<BigUint, QueryError> {
    let nodes: Vec<NodeAddress> = t.nodes().into_iter().map(|(v, _)| v).collect();
    let slots = nodes.len() * m.arity;
    if slots >= 63 || 1u64 << slots > MARKING_CAP {
        return Err(QueryError::CapExceeded(format!("2^{slots} markings")));
    }
    let mut total = BigUint::zero();
    for code in 0..1u64 << slots {
        let sets: Vec<BTreeSet<NodeAddress>> = (0..m.arity)
            .map(|k| {
                nodes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| code >> (i * m.arity + k) & 1 == 1)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let marked = mark(m, t, &sets)?;
        if !a_f.value(&marked)?.accepting.is_zero() {
            total += BigUint::one();
        }
    }
    Ok(total)
}

/// Query automata over `{ b:1 c:0 }` with one mark coordinate.
pub mod examples {
    use super::*;

    fn base() -> RankedAlphabet {
        RankedAlphabet::new([("b", 1), ("c", 0)]).expect("valid alphabet")
    }

    fn letters(m: &MarkedAlphabet) -> (SymbolId, SymbolId) {
        (m.base.lookup("b").expect("b"), m.base.lookup("c").expect("c"))
    }

    /// Selects single nodes: exactly one node is marked.
    pub fn singleton() -> (MarkedAlphabet, Automaton) {
        let m = MarkedAlphabet::new(base(), 1).expect("arity 1");
        let (b, c) = letters(&m);
        let mut a = Automaton::new(m.marked.clone());
        let s0 = a.state("s0");
        let s1 = a.state("s1");
        let add = |a: &mut Automaton, ch: Vec<StateId>, l, bits, q| {
            a.add_transition(ch, m.symbol(l, bits), q, 1).expect("fresh")
        };
        add(&mut a, vec![], c, 0, s0);
        add(&mut a, vec![], c, 1, s1);
        add(&mut a, vec![s0], b, 0, s0);
        add(&mut a, vec![s0], b, 1, s1);
        add(&mut a, vec![s1], b, 0, s1);
        a.set_accepting(s1, 1).expect("state");
        (m, a)
    }

    /// Selects every set of nodes.
    pub fn all_subsets() -> (MarkedAlphabet, Automaton) {
        let m = MarkedAlphabet::new(base(), 1).expect("arity 1");
        let (b, c) = letters(&m);
        let mut a = Automaton::new(m.marked.clone());
        let s = a.state("s");
        for bits in 0..2 {
            a.add_transition(vec![], m.symbol(c, bits), s, 1).expect("fresh");
            a.add_transition(vec![s], m.symbol(b, bits), s, 1).expect("fresh");
        }
        a.set_accepting(s, 1).expect("state");
        (m, a)
    }

    /// Selects only the empty set.
    pub fn empty_tuple() -> (MarkedAlphabet, Automaton) {
        let m = MarkedAlphabet::new(base(), 1).expect("arity 1");
        let (b, c) = letters(&m);
        let mut a = Automaton::new(m.marked.clone());
        let s = a.state("s");
        a.add_transition(vec![], m.symbol(c, 0), s, 1).expect("fresh");
        a.add_transition(vec![s], m.symbol(b, 0), s, 1).expect("fresh");
        a.set_accepting(s, 1).expect("state");
        (m, a)
    }

    /// Selects nothing: the only state is never accepting.
    pub fn nothing() -> (MarkedAlphabet, Automaton) {
        let m = MarkedAlphabet::new(base(), 1).expect("arity 1");
        let (_, c) = letters(&m);
        let mut a = Automaton::new(m.marked.clone());
        let s = a.state("s");
        a.add_transition(vec![], m.symbol(c, 0), s, 1).expect("fresh");
        (m, a)
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::automaton::parse_automaton;
    use crate::growth::Verdict;
    use crate::tree::{parse_tree, print_tree};

    fn chain(m: &MarkedAlphabet, n: usize) -> Tree {
        let mut s = "c".to_string();
        for _ in 1..n {
            s = format!("b({s})");
        }
        parse_tree(&s, m.base()).unwrap()
    }

    #[test]
    fn marking() {
        let m = MarkedAlphabet::new(RankedAlphabet::new([("b", 1), ("c", 0)]).unwrap(), 1).unwrap();
        assert_eq!(m.len(), 4);
        let t = parse_tree("c", m.base()).unwrap();
        let mt = mark(&m, &t, &[BTreeSet::new()]).unwrap();
        assert_eq!(print_tree(&mt, m.alphabet()), "c@0");
        let t = parse_tree("b(c)", m.base()).unwrap();
        let mt = mark(&m, &t, &[[NodeAddress::root()].into()]).unwrap();
        assert_eq!(print_tree(&mt, m.alphabet()), "b@1(c@0)");
        assert_eq!(project(&m, &mt), t);
        assert!(matches!(
            mark(&m, &t, &[[NodeAddress(vec![2])].into()]),
            Err(QueryError::InvalidAddress(_))
        ));
    }

    #[test]
    fn arity_limits() {
        let base = RankedAlphabet::new([("c", 0)]).unwrap();
        assert!(MarkedAlphabet::new(base.clone(), 0).is_err());
        assert!(MarkedAlphabet::new(base.clone(), 4).is_err());
        assert_eq!(MarkedAlphabet::new(base, 3).unwrap().len(), 8);
    }

    #[test]
    fn unambiguity() {
        let (_, a) = singleton();
        assert!(check_unambiguous(&a));
        let a = parse_automaton("alphabet { c@0:0 } states { q p } accept { q p } trans { () -c@0-> q () -c@0-> p }")
            .unwrap();
        assert!(!check_unambiguous(&a));
        let a = parse_automaton(
            "alphabet { c@0:0 b@0:1 } states { q p r } accept { r }
             trans { () -c@0-> q () -c@0-> p (q) -b@0-> r (p) -b@0-> r }",
        )
        .unwrap();
        assert!(!check_unambiguous(&a));
        let (m, a) = all_subsets();
        let (_, f) = reinterpret(&a).unwrap();
        assert_eq!(f.alphabet(), m.alphabet());
    }

    #[test]
    fn singleton_counts_positions() {
        let (m, a) = singleton();
        let b = build_bf(&m, &a).unwrap();
        assert_eq!(b.state_count(), a.state_count() * m.len());
        for n in 1..=6 {
            let t = chain(&m, n);
            assert_eq!(b.count_accepting_runs(&t).unwrap(), BigUint::from(n));
            assert_eq!(count_results_brute(&m, &a, &t).unwrap(), BigUint::from(n));
        }
        assert_eq!(query_growth(&m, &a).unwrap().verdict, Verdict::Polynomial(1));
    }

    #[test]
    fn subsets_grow_exponentially() {
        let (m, a) = all_subsets();
        let b = build_bf(&m, &a).unwrap();
        let t = chain(&m, 5);
        assert_eq!(b.count_accepting_runs(&t).unwrap(), BigUint::from(32u32));
        assert_eq!(query_growth(&m, &a).unwrap().verdict, Verdict::Exponential);
    }

    #[test]
    fn degenerate_queries() {
        let (m, a) = empty_tuple();
        let b = build_bf(&m, &a).unwrap();
        for n in 1..=4 {
            assert_eq!(b.count_accepting_runs(&chain(&m, n)).unwrap(), BigUint::one());
        }
        let (m, a) = nothing();
        let b = build_bf(&m, &a).unwrap();
        assert!(b.count_accepting_runs(&chain(&m, 3)).unwrap().is_zero());
        assert_eq!(query_growth(&m, &a).unwrap().verdict, Verdict::Empty);
    }

    #[test]
    fn ambiguous_queries_are_refused() {
        let m = MarkedAlphabet::new(RankedAlphabet::new([("c", 0)]).unwrap(), 1).unwrap();
        let text = "alphabet { c@0:0 c@1:0 } states { q p } accept { q p } trans { () -c@0-> q () -c@0-> p }";
        let (m2, a) = reinterpret(&parse_automaton(text).unwrap()).unwrap();
        assert_eq!(m2, m);
        assert_eq!(build_bf(&m2, &a), Err(QueryError::NotUnambiguous));
    }
}
