//! Small random transducers for property checks.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::{Mtt, MttState, Rhs, RhsLabel};
use crate::tree::{RankedAlphabet, Term, Tree};

#[derive(Clone, Copy, Debug)]
pub struct RandomMttParams {
    pub max_states: usize,
    pub max_param_rank: usize,
    pub max_rhs_size: usize,
}

impl Default for RandomMttParams {
    fn default() -> Self {
        RandomMttParams {
            max_states: 2,
            max_param_rank: 1,
            max_rhs_size: 5,
        }
    }
}

/// A random transducer from `{ f:2 g:1 e:0 }` to `{ a:2 b:1 c:0 }`.
pub fn random_mtt(rng: &mut impl Rng, p: &RandomMttParams) -> Mtt {
    let input = RankedAlphabet::new([("f", 2), ("g", 1), ("e", 0)]).expect("valid alphabet");
    let output = RankedAlphabet::new([("a", 2), ("b", 1), ("c", 0)]).expect("valid alphabet");
    let n = rng.random_range(1..=p.max_states.max(1));
    let states: Vec<MttState> = (0..n)
        .map(|i| MttState {
            name: format!("q{i}"),
            rank: if i == 0 {
                0
            } else {
                rng.random_range(0..=p.max_param_rank)
            },
        })
        .collect();
    let rules = states
        .iter()
        .map(|s| {
            input
                .ids()
                .map(|a| {
                    let budget = rng.random_range(1..=p.max_rhs_size.max(1));
                    let g = Gen {
                        output: &output,
                        states: &states,
                        vars: input.rank(a),
                        params: s.rank,
                    };
                    g.grow(rng, budget)
                })
                .collect()
        })
        .collect();
    Mtt::new(input, output, states, rules).expect("generated rules are well formed")
}

struct Gen<'a> {
    output: &'a RankedAlphabet,
    states: &'a [MttState],
    vars: usize,
    params: usize,
}

impl Gen<'_> {
    /// A right-hand side with at most `budget` nodes.
    fn grow(&self, rng: &mut impl Rng, budget: usize) -> Rhs {
        let mut options: Vec<(RhsLabel, usize)> = Vec::new();
        for s in self.output.ids() {
            options.push((RhsLabel::Out(s), self.output.rank(s)));
        }
        for (q, st) in self.states.iter().enumerate() {
            for var in 1..=self.vars {
                options.push((RhsLabel::Call { state: q, var }, st.rank));
            }
        }
        for i in 1..=self.params {
            options.push((RhsLabel::Param(i), 0));
        }
        let fitting: Vec<(RhsLabel, usize)> = options.into_iter().filter(|&(_, k)| k < budget.max(1)).collect();
        let leaves: Vec<(RhsLabel, usize)> = fitting.iter().copied().filter(|&(_, k)| k == 0).collect();
        let &(label, k) = if budget <= 1 || rng.random_bool(0.3) {
            leaves.choose(rng).expect("a rank-0 output letter exists")
        } else {
            fitting.choose(rng).expect("a rank-0 output letter exists")
        };
        let mut rest = budget.saturating_sub(1 + k);
        let mut children = Vec::with_capacity(k);
        for j in 0..k {
            let extra = if j + 1 == k { rest } else { rng.random_range(0..=rest) };
            rest -= extra;
            children.push(self.grow(rng, 1 + extra));
        }
        Term::node(label, children)
    }
}

/// A random input tree for [`random_mtt`] with at most `max_size` nodes.
pub fn random_input(rng: &mut impl Rng, m: &Mtt, max_size: usize) -> Tree {
    crate::corpus::random_tree(rng, m.input(), max_size)
}
