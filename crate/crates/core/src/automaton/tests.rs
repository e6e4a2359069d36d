use super::*;
use crate::tree::{parse_context, parse_tree};

fn aut(text: &str) -> Automaton {
    parse_automaton(text).unwrap()
}

fn ids(a: &Automaton, names: &[&str]) -> BTreeSet<StateId> {
    names.iter().map(|n| a.state_id(n).unwrap()).collect()
}

const ABC: &str = "alphabet { a:2 b:1 c:0 }";

fn tower1() -> Automaton {
    aut(&format!(
        "{ABC} states {{ q' q1 q0 }} accept {{ q0 }}
         trans {{ () -c-> q' (q') -b-> q' (q') -b-> q1 (q1) -b-> q1 (q1,q1) -a-> q0 }}"
    ))
}

fn loop2() -> Automaton {
    aut(&format!(
        "{ABC} states {{ q }} accept {{ q:1 }} trans {{ () -c-> q : 1 (q) -b-> q : 2 }}"
    ))
}

#[test]
fn format_round_trips() {
    let a = tower1();
    let b = aut(&a.to_string());
    assert_eq!(a, b);
}

#[test]
fn format_reports_errors() {
    assert!(matches!(
        parse_automaton(&format!("{ABC} states {{ q }} accept {{ }} trans {{ (q) -d-> q }}")),
        Err(ParseError::UnknownSymbol { .. })
    ));
    assert!(matches!(
        parse_automaton(&format!("{ABC} states {{ q }} accept {{ }} trans {{ (q) -a-> q }}")),
        Err(ParseError::ArityMismatch {
            expected: 2,
            found: 1,
            ..
        })
    ));
    assert!(matches!(
        parse_automaton(&format!("{ABC} states {{ q }} accept {{ r }} trans {{ }}")),
        Err(ParseError::Syntax { .. })
    ));
    assert!(parse_automaton(&format!(
        "{ABC} states {{ q }} accept {{ }} trans {{ () -c-> q () -c-> q : 2 }}"
    ))
    .is_err());
}

use crate::syntax::ParseError;

#[test]
fn single_leaf_value() {
    let a = aut(&format!("{ABC} states {{ q }} accept {{ q:1 }} trans {{ () -c-> q }}"));
    let v = a.value(&parse_tree("c", a.alphabet()).unwrap()).unwrap();
    assert_eq!(v.accepting, BigUint::from(1u32));
}

#[test]
fn weighted_loop_doubles() {
    let a = loop2();
    let t = parse_tree("b(b(b(b(b(c)))))", a.alphabet()).unwrap();
    assert_eq!(a.value(&t).unwrap().accepting, BigUint::from(32u32));
    assert_eq!(a.count_accepting_runs(&t).unwrap(), BigUint::from(1u32));
}

#[test]
fn tower_runs() {
    let a = tower1();
    let t = parse_tree("a(b(c),b(c))", a.alphabet()).unwrap();
    assert_eq!(a.count_accepting_runs(&t).unwrap(), BigUint::from(1u32));
    let t = parse_tree("a(b(b(c)),b(b(c)))", a.alphabet()).unwrap();
    assert_eq!(a.count_accepting_runs(&t).unwrap(), BigUint::from(4u32));
}

#[test]
fn empty_accepting_set_counts_zero() {
    let a = aut(&format!("{ABC} states {{ q }} accept {{ }} trans {{ () -c-> q }}"));
    let t = parse_tree("c", a.alphabet()).unwrap();
    assert_eq!(a.count_accepting_runs(&t).unwrap(), BigUint::zero());
}

#[test]
fn alphabet_mismatch_is_reported() {
    let a = tower1();
    let other = RankedAlphabet::new([("z", 0)]).unwrap();
    let t = parse_tree("z", &other).unwrap();
    // `z` has id 0, which is `a` (rank 2) in the automaton's alphabet
    assert_eq!(a.value(&t), Err(AutomatonError::AlphabetMismatch));
}

#[test]
fn accessibility() {
    let a = aut(&format!("{ABC} states {{ q }} accept {{ q }} trans {{ () -c-> q }}"));
    assert_eq!(a.accessible_states(), ids(&a, &["q"]));
    let a = aut(&format!("{ABC} states {{ q }} accept {{ q }} trans {{ (q,q) -a-> q }}"));
    assert!(a.accessible_states().is_empty());
    let a = tower1();
    assert_eq!(a.accessible_states(), ids(&a, &["q'", "q1", "q0"]));
}

fn edges(a: &Automaton, list: &[(&str, &str)]) -> BTreeSet<(StateId, StateId)> {
    list.iter()
        .map(|(x, y)| (a.state_id(x).unwrap(), a.state_id(y).unwrap()))
        .collect()
}

#[test]
fn shallow_digraph_rules() {
    let a = aut(&format!(
        "{ABC} states {{ q' q }} accept {{ q }} trans {{ () -c-> q' (q') -b-> q }}"
    ));
    assert_eq!(a.shallow_digraph().edge_set(), edges(&a, &[("q'", "q")]));

    let a = aut(&format!(
        "{ABC} states {{ p q r }} accept {{ r }} trans {{ () -c-> p (p,q) -a-> r }}"
    ));
    assert_eq!(a.shallow_digraph().edge_set(), edges(&a, &[("q", "r")]));

    let a = tower1();
    assert_eq!(
        a.shallow_digraph().edge_set(),
        edges(&a, &[("q'", "q'"), ("q'", "q1"), ("q1", "q1"), ("q1", "q0")])
    );
}

#[test]
fn trimming() {
    let a = tower1();
    assert_eq!(a.trim(), a);
    assert!(a.is_trim());

    let a = aut(&format!(
        "{ABC} states {{ q p }} accept {{ q }} trans {{ () -c-> q () -c-> p }}"
    ));
    let t = a.trim();
    assert_eq!(t.state_count(), 1);
    assert_eq!(t.transitions().len(), 1);
    assert_eq!(t.state_name(StateId(0)), "q");

    let a = aut(&format!("{ABC} states {{ q }} accept {{ }} trans {{ () -c-> q }}"));
    let t = a.trim();
    assert_eq!(t.state_count(), 0);
    assert!(t.transitions().is_empty());
}

#[test]
fn products() {
    let a = aut(&format!(
        "{ABC} states {{ q }} accept {{ q }} trans {{ () -c-> q (q) -b-> q }}"
    ));
    let p = product(&a, &a).unwrap();
    assert_eq!(p.automaton.state_count(), 1);
    assert_eq!(p.automaton.transitions().len(), 2);
    assert!(p.automaton.accepting().is_empty());

    let a = aut(&format!(
        "{ABC} states {{ q p }} accept {{ q }} trans {{ () -c-> q () -c-> p }}"
    ));
    let p = product(&a, &a).unwrap();
    let targets: BTreeSet<StateId> = p.automaton.transitions().iter().map(|t| t.target).collect();
    assert_eq!(targets.len(), 4);
    assert!(p.automaton.transitions().iter().all(|t| t.children.is_empty()));
    let q = a.state_id("q").unwrap();
    let pp = a.state_id("p").unwrap();
    assert_eq!(p.pairs[p.id(q, pp).index()], (q, pp));
}

#[test]
fn triple_product_has_cubic_states() {
    let a = tower1();
    let p2 = product(&a, &a).unwrap();
    let p3 = product(&p2.automaton, &a).unwrap();
    assert_eq!(p3.automaton.state_count(), 27);
}

#[test]
fn pair_accessibility() {
    let a = tower1();
    let pa = pair_accessible(&a);
    for q in a.states() {
        assert!(pa.contains(&(q, q)));
    }
    let a = aut(&format!(
        "{ABC} states {{ q p }} accept {{ q }} trans {{ () -c-> q () -c-> p }}"
    ));
    assert_eq!(pair_accessible(&a).len(), 4);

    let cd = "alphabet { c:0 d:0 }";
    let a = aut(&format!(
        "{cd} states {{ q p }} accept {{ q }} trans {{ () -c-> q () -d-> p }}"
    ));
    let (q, p) = (a.state_id("q").unwrap(), a.state_id("p").unwrap());
    assert!(!pair_accessible(&a).contains(&(q, p)));
}

#[test]
fn demand_driven_pairs_match_full_product() {
    let a = tower1();
    let all: Vec<[StateId; 2]> = a.states().flat_map(|x| a.states().map(move |y| [x, y])).collect();
    let access = TupleAccess::<2>::explore(&a, all.clone());
    let full = pair_accessible(&a);
    for t in all {
        assert_eq!(access.accessible(&t), full.contains(&(t[0], t[1])));
    }
}

#[test]
fn tuple_witnesses_have_all_runs() {
    let a = tower1();
    let q1 = a.state_id("q1").unwrap();
    let qp = a.state_id("q'").unwrap();
    let mut access = TupleAccess::<3>::explore(&a, [[qp, q1, q1]]);
    let t = access.witness(&[qp, q1, q1]).unwrap();
    assert_eq!(crate::tree::print_tree(&t, a.alphabet()), "b(c)");
    let v = a.value(&t).unwrap();
    assert!(!v.of(qp).is_zero() && !v.of(q1).is_zero());
}

#[test]
fn ambiguity() {
    let det = aut(&format!(
        "{ABC} states {{ q }} accept {{ q }} trans {{ () -c-> q (q) -b-> q (q,q) -a-> q }}"
    ));
    assert!(ambiguous_states(&det).is_empty());

    let a = tower1();
    assert_eq!(ambiguous_states(&a), ids(&a, &["q1", "q0"]));
    let t = ambiguous_witness(&a, a.state_id("q1").unwrap()).unwrap();
    assert_eq!(crate::tree::print_tree(&t, a.alphabet()), "b(b(c))");

    let a = aut(&format!(
        "{ABC} states {{ q p r }} accept {{ r }}
         trans {{ () -c-> q () -c-> p (q) -b-> r (p) -b-> r }}"
    ));
    assert_eq!(ambiguous_states(&a), ids(&a, &["r"]));
}

#[test]
fn context_values() {
    let a = loop2();
    let q = a.state_id("q").unwrap();
    let c = parse_context("b(_HOLE)", a.alphabet()).unwrap();
    assert_eq!(a.context_value(&c, q, q).unwrap(), BigUint::from(2u32));
    assert_eq!(a.context_value(&Context::hole(), q, q).unwrap(), BigUint::one());

    let a = tower1();
    let (qp, q1) = (a.state_id("q'").unwrap(), a.state_id("q1").unwrap());
    let c = parse_context("b(_HOLE)", a.alphabet()).unwrap();
    assert_eq!(a.context_value(&c, qp, q1).unwrap(), BigUint::one());
    let c = parse_context("b(b(_HOLE))", a.alphabet()).unwrap();
    assert_eq!(a.context_value(&c, qp, q1).unwrap(), BigUint::from(2u32));
}

#[test]
fn run_weights() {
    let a = loop2();
    let q = a.state_id("q").unwrap();
    let t = parse_tree("b(b(c))", a.alphabet()).unwrap();
    let run = Run(Term::node(q, vec![Term::node(q, vec![Term::leaf(q)])]));
    assert_eq!(a.run_weight(&t, &run).unwrap(), BigUint::from(4u32));
    let bad = Run(Term::node(q, vec![Term::leaf(q)]));
    assert!(matches!(a.run_weight(&t, &bad), Err(AutomatonError::InvalidRun(_))));
}

#[test]
fn min_trees_are_smallest() {
    let a = tower1();
    let m = a.min_trees();
    let q0 = a.state_id("q0").unwrap();
    assert_eq!(m.size(q0), Some(5));
    let t = m.tree(q0).unwrap();
    assert_eq!(crate::tree::print_tree(&t, a.alphabet()), "a(b(c),b(c))");
}
