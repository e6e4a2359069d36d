use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::tree::{parse_tree, print_tree, Tree};

fn s_chain(m: &Mtt, n: usize) -> Tree {
    let text = format!("{}0{}", "S(".repeat(n), ")".repeat(n));
    parse_tree(&text, m.input()).unwrap()
}

/// `q⟨t⟩` by plain substitution, no sharing.
fn naive(m: &Mtt, q: usize, t: &Tree) -> Term<ValueLabel> {
    fn inst(m: &Mtt, r: &Rhs, t: &Tree) -> Term<ValueLabel> {
        match r.label {
            RhsLabel::Out(s) => Term::node(ValueLabel::Out(s), r.children.iter().map(|c| inst(m, c, t)).collect()),
            RhsLabel::Param(i) => Term::leaf(ValueLabel::Param(i)),
            RhsLabel::Call { state, var } => {
                let body = naive(m, state, &t.children[var - 1]);
                let args: Vec<_> = r.children.iter().map(|c| inst(m, c, t)).collect();
                plug(&body, &args)
            }
        }
    }
    fn plug(b: &Term<ValueLabel>, args: &[Term<ValueLabel>]) -> Term<ValueLabel> {
        match b.label {
            ValueLabel::Param(j) => args[j - 1].clone(),
            l => Term::node(l, b.children.iter().map(|c| plug(c, args)).collect()),
        }
    }
    inst(m, m.rhs(q, t.label), t)
}

/// Branches straight from the inductive clauses.
fn branches_by_definition(t: &Tree, ba: &BranchAlphabet) -> BTreeSet<Tree> {
    let mut out: BTreeSet<Tree> = [Term::leaf(ba.end())].into();
    for c in &t.children {
        for b in branches_by_definition(c, ba) {
            out.insert(Term::node(ba.hat(t.label).unwrap(), vec![b]));
        }
    }
    out
}

#[test]
fn example_outputs() {
    let m = example();
    let out = mtt_eval(&m, &s_chain(&m, 2)).unwrap();
    assert_eq!(print_tree(&out, m.output()), "a(a(c,b(c)),b(a(c,b(c))))");
    assert_eq!(out.height(), 4);
    let out = mtt_eval(&m, &s_chain(&m, 0)).unwrap();
    assert_eq!(print_tree(&out, m.output()), "b(c)");
}

#[test]
fn shared_evaluation_matches_substitution() {
    let m = example();
    for n in 0..=4 {
        let t = s_chain(&m, n);
        for q in 0..m.states().len() {
            assert_eq!(state_value(&m, q, &t, DEFAULT_OUTPUT_CAP).unwrap(), naive(&m, q, &t));
        }
    }
}

#[test]
fn output_cap_is_enforced() {
    let m = example();
    let err = mtt_eval_with(&m, &s_chain(&m, 6), 1000).unwrap_err();
    assert!(matches!(err, MttError::OutputSizeCap { cap: 1000, .. }), "{err}");
    // far past the cap, the shared form still bounds the work
    assert!(mtt_eval(&m, &s_chain(&m, 12)).is_err());
}

#[test]
fn constant_rule() {
    let m = parse_mtt("state q0:0; rule q0(c) = d;").unwrap();
    let t = parse_tree("c", m.input()).unwrap();
    assert_eq!(print_tree(&mtt_eval(&m, &t).unwrap(), m.output()), "d");
}

#[test]
fn alphabet_mismatch() {
    let m = example();
    let other = crate::corpus::abc();
    let t = parse_tree("b(c)", &other).unwrap();
    assert_eq!(mtt_eval(&m, &t), Err(MttError::AlphabetMismatch));
}

#[test]
fn text_round_trip() {
    let m = example();
    assert_eq!(parse_mtt(&m.to_string()).unwrap(), m);
    assert_eq!(m.states()[0].name, "q0");
}

#[test]
fn parse_errors() {
    for (src, needle) in [
        ("state q0:1; rule q0(c)(y1) = c;", "rank 0"),
        ("state q0:0; rule q0(c) = q1[x1];", "unknown state"),
        ("state q0:0; state q1:0; rule q0(c) = d;", "no rule"),
        (
            "state q0:0; rule q0(S(x1)) = q0[x2]; rule q0(e) = c;",
            "x2 out of range",
        ),
        ("state q0:0; rule q0(S(x2)) = c;", "expected `x1`"),
        (
            "state q0:0; state q1:1; rule q0(c) = q1[x1]; rule q1(c)(y1) = d;",
            "x1 out of range",
        ),
        ("state q0:0; rule q0(c) = d; rule q0(c) = d;", "second rule"),
        ("output { d:0 } state q0:0; rule q0(c) = e;", "unknown symbol"),
        ("state q0:0; rule q0(c) = a(d); rule q0(e) = a;", "rank 1"),
    ] {
        let err = parse_mtt(src).unwrap_err().to_string();
        assert!(err.contains(needle), "{src}: {err}");
    }
}

#[test]
fn branch_alphabet_size() {
    let m = example();
    let ba = BranchAlphabet::new(m.output());
    assert_eq!(ba.alphabet().len(), 1 + 2);
    assert_eq!(ba.alphabet().to_string(), "{ hat_a:1 hat_b:1 END:0 }");
}

#[test]
fn figure_branches() {
    let gamma = crate::corpus::abc();
    let ba = BranchAlphabet::new(&gamma);
    let t = parse_tree("a(b(b(c)),a(b(c),c))", &gamma).unwrap();
    let got: BTreeSet<String> = branches(&t, &ba).iter().map(|b| print_tree(b, ba.alphabet())).collect();
    let want: BTreeSet<String> = [
        "END",
        "hat_a(END)",
        "hat_a(hat_b(END))",
        "hat_a(hat_b(hat_b(END)))",
        "hat_a(hat_a(hat_b(END)))",
        "hat_a(hat_a(END))",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    assert_eq!(got, want);
    let longest = branches(&t, &ba).iter().map(Tree::size).max().unwrap();
    assert_eq!(longest, 4);
    assert_eq!(t.height() + 1, 4);

    let c = parse_tree("c", &gamma).unwrap();
    assert_eq!(branches(&c, &ba).len(), 1);
}

#[test]
fn branches_agree_with_clauses_on_random_trees() {
    let gamma = crate::corpus::abc();
    let ba = BranchAlphabet::new(&gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let t = crate::corpus::random_tree(&mut rng, &gamma, 15);
        let b = branches(&t, &ba);
        assert_eq!(b, branches_by_definition(&t, &ba));
        assert_eq!(b.iter().map(Tree::size).max().unwrap(), t.height() + 1);
    }
}

fn show(m: &Mtt, b: &RhsBranch) -> String {
    let mut s = String::new();
    b.write_with(&mut s, &|l, f| match *l {
        BranchLabel::Hat(a) => write!(f, "hat_{}", m.output().name(a)),
        BranchLabel::End => f.write_str("END"),
        BranchLabel::Param(i) => write!(f, "y{i}"),
        BranchLabel::CallEnd { state, var } => write!(f, "{}^END[x{var}]", m.states()[state].name),
        BranchLabel::CallParam { state, param, var } => {
            write!(f, "{}^y{param}[x{var}]", m.states()[state].name)
        }
    })
    .unwrap();
    s
}

#[test]
fn rhs_branch_clauses() {
    let m = example();
    let zero = m.input().lookup("0").unwrap();
    let s = m.input().lookup("S").unwrap();
    let q0 = m.state_index("q0").unwrap();
    let q1 = m.state_index("q1").unwrap();

    let y1: Rhs = Term::leaf(RhsLabel::Param(1));
    let got: Vec<String> = rhs_branches(&y1).iter().map(|b| show(&m, b)).collect();
    assert_eq!(got, ["END", "y1"]);

    let got: Vec<String> = rhs_branches(m.rhs(q0, zero)).iter().map(|b| show(&m, b)).collect();
    assert_eq!(got, ["END", "hat_b(END)"]);

    let got: BTreeSet<String> = rhs_branches(m.rhs(q0, s)).iter().map(|b| show(&m, b)).collect();
    let want: BTreeSet<String> = ["END", "q1^END[x1]", "q1^y1[x1](END)"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(got, want);

    let bs = rhs_branches(m.rhs(q1, s));
    let kinds: Vec<BranchKind> = bs.iter().map(BranchKind::of).collect();
    assert_eq!(kinds.iter().filter(|&&k| k == BranchKind::Param(1)).count(), 1);
    assert_eq!(kinds.iter().filter(|&&k| k == BranchKind::End).count(), 5);
}

#[test]
fn hat_shape() {
    let m = example();
    let h = hat(&m);
    let expected: usize = m.states().iter().map(|s| 1 + s.rank).sum();
    assert_eq!(h.states().len(), expected);
    assert_eq!(h.state_name(0), "q0_END");
    let s = m.input().lookup("S").unwrap();
    let zero = m.input().lookup("0").unwrap();
    assert_eq!(h.annotation_count(s), 30u32.into());
    assert_eq!(h.annotation_count(zero), 18u32.into());
    assert_eq!(h.annotations(s).count(), 30);
    let distinct: BTreeSet<_> = h.annotations(s).collect();
    assert_eq!(distinct.len(), 30);
    assert!(h.annotations(s).all(|a| a.letter == s));
}

#[test]
fn annotated_outputs_are_branches() {
    let m = example();
    let h = hat(&m);
    for n in 0..=2 {
        let t = s_chain(&m, n);
        let all = branches(&mtt_eval(&m, &t).unwrap(), h.branch_alphabet());
        let annotated = h.annotate_all(&t, 1_000_000).unwrap();
        let mut seen = BTreeSet::new();
        for at in &annotated {
            assert_eq!(h.project(at), t);
            let b = h.eval(at).unwrap();
            assert!(all.contains(&b));
            seen.insert(b);
        }
        // the deduplicated enumeration sees exactly the same outputs
        assert_eq!(seen, h.reachable_outputs(&t, 10_000_000).unwrap());
    }
}

#[test]
fn materialized_hat_agrees_with_direct_evaluation() {
    let m = example();
    let h = hat(&m);
    let (tm, letters) = h.materialize(1000).unwrap();
    assert_eq!(tm.states().len(), 3);
    assert_eq!(tm.input().len(), 48);
    assert_eq!(parse_mtt(&tm.to_string()).unwrap(), tm);
    let t = s_chain(&m, 1);
    for at in h.annotate_all(&t, 1000).unwrap() {
        let plain = at.map(&mut |s| SymbolId(letters.iter().position(|l| l == s).unwrap() as u32));
        assert_eq!(mtt_eval(&tm, &plain).unwrap(), h.eval(&at).unwrap());
    }
    assert!(matches!(h.materialize(10), Err(MttError::AnnotationExplosion { .. })));
}

#[test]
fn height_lemma_on_example() {
    let m = example();
    let r = verify_height_lemma(&m, &s_chain(&m, 2), LemmaCaps::default()).unwrap();
    assert_eq!(r.output_height, 4);
    assert_eq!(r.max_branch_size, 5);
    assert!(r.all_branches);
    for n in 0..=4 {
        let r = verify_height_lemma(&m, &s_chain(&m, n), LemmaCaps::default()).unwrap();
        assert!(r.holds(), "n = {n}: {r:?}");
    }
}

#[test]
fn height_lemma_constant() {
    let m = parse_mtt("state q0:0; rule q0(S(x1)) = c; rule q0(0) = c;").unwrap();
    let h = hat(&m);
    let t = parse_tree("S(S(0))", m.input()).unwrap();
    for at in h.annotate_all(&t, 100).unwrap() {
        assert_eq!(print_tree(&h.eval(&at).unwrap(), h.branch_alphabet().alphabet()), "END");
    }
    let r = verify_height_lemma(&m, &t, LemmaCaps::default()).unwrap();
    assert_eq!((r.output_height + 1, r.max_branch_size), (1, 1));
}

#[test]
fn height_lemma_on_random_transducers() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let m = random_mtt(&mut rng, &RandomMttParams::default());
        for t in crate::oracle::enum_trees(m.input(), 3).unwrap() {
            for q in 0..m.states().len() {
                assert_eq!(state_value(&m, q, &t, DEFAULT_OUTPUT_CAP).unwrap(), naive(&m, q, &t));
            }
            let r = verify_height_lemma(&m, &t, LemmaCaps::default()).unwrap();
            assert!(r.holds(), "{m}\non {}: {r:?}", print_tree(&t, m.input()));
        }
    }
}

use crate::tree::SymbolId;
