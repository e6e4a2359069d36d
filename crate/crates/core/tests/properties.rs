use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treegrowth::corpus::{abc, random_automaton, random_tree, RandomParams};
use treegrowth::growth::critical_nodes;
use treegrowth::oracle::{enum_runs, value_by_runs};
use treegrowth::query::{mark, project, MarkedAlphabet};
use treegrowth::{analyze, parse_context, parse_tree, print_context, print_tree, Context, Term, Tree, Verdict};

fn abc_tree() -> impl Strategy<Value = Tree> {
    let al = abc();
    let (a, b, c) = (
        al.lookup("a").unwrap(),
        al.lookup("b").unwrap(),
        al.lookup("c").unwrap(),
    );
    Just(Term::leaf(c)).prop_recursive(5, 40, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(move |t| Term::node(b, vec![t])),
            (inner.clone(), inner).prop_map(move |(l, r)| Term::node(a, vec![l, r])),
        ]
    })
}

fn seeded(seed: u64) -> (ChaCha8Rng, RandomParams) {
    (ChaCha8Rng::seed_from_u64(seed), RandomParams::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tree_text_round_trip(t in abc_tree()) {
        let al = abc();
        let text = print_tree(&t, &al);
        prop_assert_eq!(parse_tree(&text, &al).unwrap(), t);
    }

    #[test]
    fn context_power_sizes(t in abc_tree(), side in abc_tree(), n in 0usize..6) {
        let al = abc();
        let c = parse_context(&format!("a(_HOLE,{})", print_tree(&side, &al)), &al).unwrap();
        let pumped = c.power(n).apply(&t);
        prop_assert_eq!(pumped.size(), t.size() + n * (c.size() - 1));
        let back = parse_context(&print_context(&c, &al), &al).unwrap();
        prop_assert_eq!(back, c);
        prop_assert_eq!(Context::hole().apply(&t), t);
    }

    #[test]
    fn mark_then_project(t in abc_tree(), pick in proptest::collection::vec(any::<bool>(), 40)) {
        let m = MarkedAlphabet::new(abc(), 1).unwrap();
        let nodes: BTreeSet<_> = t
            .nodes()
            .into_iter()
            .zip(pick.iter().cycle())
            .filter(|(_, &keep)| keep)
            .map(|((v, _), _)| v)
            .collect();
        let marked = mark(&m, &t, std::slice::from_ref(&nodes)).unwrap();
        prop_assert_eq!(project(&m, &marked), t);
        for (v, node) in marked.nodes() {
            prop_assert_eq!(m.decode(node.label).1 == 1, nodes.contains(&v));
        }
    }

    #[test]
    fn value_equals_weighted_run_count(seed in any::<u64>()) {
        let (mut rng, p) = seeded(seed);
        let a = random_automaton(&mut rng, &p);
        let t = random_tree(&mut rng, a.alphabet(), 7);
        let dp = a.value(&t).unwrap().accepting;
        prop_assert_eq!(&dp, &value_by_runs(&a, &t).unwrap());
        prop_assert_eq!(dp, a.trim().value(&t).unwrap().accepting);
    }

    #[test]
    fn critical_nodes_bounded_by_degree(seed in any::<u64>(), t in abc_tree()) {
        prop_assume!(t.size() <= 9);
        let (mut rng, p) = seeded(seed);
        let r = analyze(&random_automaton(&mut rng, &p));
        prop_assume!(matches!(r.verdict, Verdict::Polynomial(_)));
        let d = r.degrees.as_ref().unwrap();
        for run in enum_runs(&r.trimmed, &t).unwrap() {
            if r.trimmed.is_accepting(run.root()) {
                let crit = critical_nodes(&r.trimmed, d, &t, &run).unwrap();
                prop_assert!(crit.len() as u64 <= d.of(run.root()));
            }
        }
    }
}
