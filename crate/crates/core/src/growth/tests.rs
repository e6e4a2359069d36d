use num_bigint::BigUint;

use super::*;
use crate::automaton::parse_automaton;
use crate::corpus::tower;
use crate::oracle::{brute_barbells, brute_heavy, count_runs};
use crate::tree::{parse_tree, print_context, print_tree};

const ABC: &str = "alphabet { a:2 b:1 c:0 }";

fn aut(body: &str) -> Automaton {
    parse_automaton(&format!("{ABC} {body}")).unwrap()
}

fn id(a: &Automaton, n: &str) -> StateId {
    a.state_id(n).unwrap()
}

fn loop2() -> Automaton {
    aut("states { q } accept { q } trans { () -c-> q (q) -b-> q : 2 }")
}

fn center_example() -> Automaton {
    aut("states { q r } accept { q } trans { () -c-> q (q) -b-> r (r) -b-> q (q) -b-> q }")
}

fn side_example() -> Automaton {
    aut("states { q p r } accept { r }
         trans { () -c-> q () -c-> p (q) -b-> r (p) -b-> r (r,r) -a-> r }")
}

fn deterministic() -> Automaton {
    aut("states { q } accept { q } trans { () -c-> q (q) -b-> q (q,q) -a-> q }")
}

#[test]
fn scalar_detector() {
    let ev = detect_scalar_heavy(&loop2()).unwrap().unwrap();
    assert_eq!(ev.kind, HeavyKind::ScalarHeavy);
    assert!(detect_scalar_heavy(&tower(1)).unwrap().is_none());
    let off_cycle = aut("states { q } accept { q } trans { () -c-> q : 2 (q) -b-> q }");
    assert!(detect_scalar_heavy(&off_cycle).unwrap().is_none());
    assert!(brute_heavy(&off_cycle, 6).unwrap().is_none());
}

#[test]
fn center_detector() {
    assert!(detect_center_ambiguous(&deterministic()).unwrap().is_none());
    let ev = detect_center_ambiguous(&center_example()).unwrap().unwrap();
    assert_eq!(ev.kind, HeavyKind::CenterAmbiguous);
    assert!(detect_center_ambiguous(&tower(1)).unwrap().is_none());
    assert!(detect_center_ambiguous(&tower(2)).unwrap().is_none());
}

/// The shortest heavy context has 13 nodes.
#[test]
fn center_cycle_with_large_context() {
    let a = aut("states { q0 q1 } accept { q1 }
                 trans { (q1,q1) -a-> q1 (q1,q1) -a-> q0 (q0,q0) -a-> q1 (q0) -b-> q0 (q1) -b-> q1 () -c-> q0 }");
    let ev = has_heavy_cycle(&a).unwrap().unwrap();
    assert_eq!(ev.kind, HeavyKind::CenterAmbiguous);
    assert!(brute_heavy(&a, 12).unwrap().is_none());
    let (q, c) = brute_heavy(&a, 13).unwrap().unwrap();
    assert_eq!(q, id(&a, "q1"));
    assert_eq!(print_context(&c, a.alphabet()), "a(a(a(c,c),a(c,c)),a(a(c,c),_HOLE))");
    check_exp(&a);
}

#[test]
fn side_detector() {
    assert!(detect_side_ambiguous(&tower(1)).unwrap().is_none());
    let ev = detect_side_ambiguous(&side_example()).unwrap().unwrap();
    assert_eq!(ev.kind, HeavyKind::SideAmbiguous);
    assert!(matches!(ev.detail, HeavyDetail::SideAmbiguousChild { .. }));
    assert!(detect_side_ambiguous(&deterministic()).unwrap().is_none());
    // the oracle sees the same two runs on a(□, b(c))
    let a = side_example();
    let c = crate::tree::parse_context("a(_HOLE,b(c))", a.alphabet()).unwrap();
    let r = id(&a, "r");
    assert_eq!(a.context_value(&c, r, r).unwrap(), BigUint::from(2u32));
}

#[test]
fn side_detector_distinct_transitions() {
    // two a-transitions into r differing on the left child
    let a = aut("states { p s r } accept { r }
         trans { () -c-> p () -c-> s () -c-> r (p,r) -a-> r (s,r) -a-> r }");
    let ev = has_heavy_cycle(&a).unwrap().unwrap();
    assert_eq!(ev.kind, HeavyKind::SideAmbiguous);
    assert!(brute_heavy(&a, 4).unwrap().is_some());
}

#[test]
fn heavy_cycle_order() {
    assert_eq!(has_heavy_cycle(&loop2()).unwrap().unwrap().kind, HeavyKind::ScalarHeavy);
    for n in 1..=4 {
        assert!(has_heavy_cycle(&tower(n)).unwrap().is_none());
    }
    assert_eq!(
        has_heavy_cycle(&center_example()).unwrap().unwrap().kind,
        HeavyKind::CenterAmbiguous
    );
}

#[test]
fn untrimmed_input_is_refused() {
    let a = aut("states { q p } accept { q } trans { () -c-> q }");
    assert_eq!(has_heavy_cycle(&a), Err(GrowthError::NotTrimmed));
    assert_eq!(barbell_pairs(&a), Err(GrowthError::NotTrimmed));
}

#[test]
fn tower_barbells() {
    let a = tower(1);
    let b = barbell_pairs(&a).unwrap();
    let want: BTreeSet<_> = [(id(&a, "q'"), id(&a, "q1"))].into();
    assert_eq!(b.pairs, want);
    assert_eq!(brute_barbells(&a, 6).unwrap(), b);
    let c = barbell_context(&a, id(&a, "q'"), id(&a, "q1")).unwrap();
    assert_eq!(print_context(&c, a.alphabet()), "b(_HOLE)");

    let a = tower(3);
    let want: BTreeSet<_> = [(id(&a, "q'"), id(&a, "q3"))].into();
    assert_eq!(barbell_pairs(&a).unwrap().pairs, want);
}

#[test]
fn simple_barbell() {
    let a = aut("states { p q } accept { q } trans { () -c-> p (p) -b-> p (p) -b-> q (q) -b-> q }");
    let want: BTreeSet<_> = [(id(&a, "p"), id(&a, "q"))].into();
    assert_eq!(barbell_pairs(&a).unwrap().pairs, want);
    assert_eq!(brute_barbells(&a, 5).unwrap().pairs, want);
    assert!(barbell_pairs(&deterministic()).unwrap().pairs.is_empty());
}

#[test]
fn tower_degrees() {
    let a = tower(1);
    let d = degrees(&a, &barbell_pairs(&a).unwrap()).unwrap();
    assert_eq!((d.of(id(&a, "q'")), d.of(id(&a, "q1")), d.of(id(&a, "q0"))), (0, 1, 2));
    let a = tower(2);
    let d = degrees(&a, &barbell_pairs(&a).unwrap()).unwrap();
    let got: Vec<u64> = ["q'", "q2", "q1", "q0"].iter().map(|n| d.of(id(&a, n))).collect();
    assert_eq!(got, [0, 1, 2, 4]);
    assert!(d.iterations <= a.state_count());
}

#[test]
fn degrees_refuse_heavy_cycles() {
    let a = loop2();
    assert_eq!(degrees(&a, &BarbellSet::default()), Err(GrowthError::HeavyCyclePresent));
}

#[test]
fn barbell_free_degrees_vanish() {
    let a = deterministic();
    let d = degrees(&a, &barbell_pairs(&a).unwrap()).unwrap();
    assert_eq!(d.max(), 0);
}

#[test]
fn verdicts() {
    let empty = aut("states { q } accept { } trans { () -c-> q }");
    assert_eq!(analyze(&empty).verdict, Verdict::Empty);
    for n in 1..=4 {
        assert_eq!(analyze(&tower(n)).verdict, Verdict::Polynomial(1 << n));
    }
    assert_eq!(analyze(&loop2()).verdict, Verdict::Exponential);
}

#[test]
fn loop_exp_witness() {
    let a = loop2();
    let ev = has_heavy_cycle(&a).unwrap().unwrap();
    let w = exp_witness(&a, &ev).unwrap();
    let al = a.alphabet();
    assert_eq!(print_context(&w.context, al), "b(_HOLE)");
    assert_eq!(print_tree(&w.tree, al), "c");
    assert!(w.outer.is_hole());
    for n in 0..6 {
        assert_eq!(a.value(&w.instance(n)).unwrap().accepting, BigUint::from(1u32) << n);
    }
}

fn check_exp(a: &Automaton) {
    let ev = has_heavy_cycle(a).unwrap().unwrap();
    let w = exp_witness(a, &ev).unwrap();
    for n in [1usize, 4, 8] {
        assert!(a.value(&w.instance(n)).unwrap().accepting >= BigUint::from(1u32) << n);
    }
}

#[test]
fn exp_witnesses_for_each_kind() {
    check_exp(&loop2());
    check_exp(&center_example());
    check_exp(&side_example());
    check_exp(&aut("states { p s r } accept { r }
         trans { () -c-> p () -c-> s () -c-> r (p,r) -a-> r (s,r) -a-> r }"));
    // scalar-heavy side child
    check_exp(&aut("states { h r } accept { r }
         trans { () -c-> h : 2 () -c-> r (h,r) -a-> r }"));
}

#[test]
fn center_witness_context() {
    let a = center_example();
    let ev = has_heavy_cycle(&a).unwrap().unwrap();
    let w = exp_witness(&a, &ev).unwrap();
    assert_eq!(print_tree(&w.tree, a.alphabet()), "c");
    let q = id(&a, "q");
    assert!(a.context_value(&w.context, q, q).unwrap() >= BigUint::from(2u32));
}

#[test]
fn tower_poly_witness() {
    let a = tower(1);
    let b = barbell_pairs(&a).unwrap();
    let d = degrees(&a, &b).unwrap();
    let w = poly_witness(&a, &d, &b).unwrap();
    assert_eq!(w.pattern.degree(), 2);
    assert_eq!(
        w.pattern.display(a.alphabet()).to_string(),
        "a(pump[b(_HOLE)](c),pump[b(_HOLE)](c))"
    );
    for n in [2usize, 3, 5] {
        let runs = a.count_accepting_runs(&w.instance(n)).unwrap();
        assert!(runs >= BigUint::from(n.pow(2)));
        assert_eq!(runs, count_runs(&a, &w.instance(n)).unwrap());
    }

    let a = tower(2);
    let b = barbell_pairs(&a).unwrap();
    let d = degrees(&a, &b).unwrap();
    let w = poly_witness(&a, &d, &b).unwrap();
    assert_eq!(w.pattern.degree(), 4);
    let leaf = "pump[b(_HOLE)](c)";
    let mid = format!("a({leaf},{leaf})");
    assert_eq!(w.pattern.display(a.alphabet()).to_string(), format!("a({mid},{mid})"));
}

#[test]
fn barbell_free_pattern_is_a_tree() {
    let a = deterministic();
    let b = barbell_pairs(&a).unwrap();
    let d = degrees(&a, &b).unwrap();
    let w = poly_witness(&a, &d, &b).unwrap();
    assert_eq!(w.pattern.degree(), 0);
    assert!(a.count_accepting_runs(&w.instance(3)).unwrap() >= BigUint::from(1u32));
}

#[test]
fn tower_critical_nodes() {
    let a = tower(1);
    let d = degrees(&a, &barbell_pairs(&a).unwrap()).unwrap();
    let t = parse_tree("a(b(c),b(c))", a.alphabet()).unwrap();
    let runs = crate::oracle::enum_runs(&a, &t).unwrap();
    let acc: Vec<_> = runs.into_iter().filter(|r| a.is_accepting(r.root())).collect();
    assert_eq!(acc.len(), 1);
    let crit = critical_nodes(&a, &d, &t, &acc[0]).unwrap();
    let want: BTreeSet<NodeAddress> = [NodeAddress(vec![1]), NodeAddress(vec![2])].into();
    assert_eq!(crit, want);
}

#[test]
fn critical_nodes_reject_bad_runs() {
    let a = tower(1);
    let d = degrees(&a, &barbell_pairs(&a).unwrap()).unwrap();
    let t = parse_tree("b(c)", a.alphabet()).unwrap();
    let q0 = id(&a, "q0");
    let bad = Run(Term::node(q0, vec![Term::leaf(q0)]));
    assert!(matches!(
        critical_nodes(&a, &d, &t, &bad),
        Err(GrowthError::InvalidRun(_))
    ));
}

use crate::automaton::Run;
use crate::tree::NodeAddress;
