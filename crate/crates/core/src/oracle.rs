//! Exhaustive enumeration of trees, contexts and runs. Slow on purpose: every
//! structural answer of [`crate::growth`] can be checked against it on small
//! automata.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::automaton::{Automaton, AutomatonError, Run, StateId};
use crate::growth::BarbellSet;
use crate::tree::{Context, RankedAlphabet, Slot, Term, Tree};

/// Enumerations refuse to produce more than this many items.
pub const ENUM_CAP: usize = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("the alphabet has no rank-0 letter")]
    NoNullarySymbol,
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

fn leaves(al: &RankedAlphabet) -> Result<(), OracleError> {
    if al.ids().any(|s| al.rank(s) == 0) {
        Ok(())
    } else {
        Err(OracleError::NoNullarySymbol)
    }
}

fn preorder_key<L>(t: &Term<L>, key: &impl Fn(&L) -> u32, out: &mut Vec<u32>) {
    out.push(key(&t.label));
    for c in &t.children {
        preorder_key(c, key, out);
    }
}

fn sort_canonical<L>(v: &mut [Term<L>], key: impl Fn(&L) -> u32) {
    v.sort_by_cached_key(|t| {
        let mut k = Vec::with_capacity(t.size());
        preorder_key(t, &key, &mut k);
        k
    });
}

/// All ways to split `total` into `parts` positive sizes.
fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<usize>>) {
    fn go(rest: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for s in 1..=rest.saturating_sub(left - 1) {
            cur.push(s);
            go(rest - s, left - 1, cur, out);
            cur.pop();
        }
    }
    go(total, parts, &mut Vec::new(), out);
}

/// Cartesian products of child lists.
fn products<L: Clone>(lists: &[&[Term<L>]], label: &L, out: &mut Vec<Term<L>>) {
    let mut pick = vec![0usize; lists.len()];
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    loop {
        out.push(Term::node(
            label.clone(),
            pick.iter().zip(lists).map(|(&i, l)| l[i].clone()).collect(),
        ));
        let mut k = 0;
        while k < lists.len() {
            pick[k] += 1;
            if pick[k] < lists[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
        if k == lists.len() {
            return;
        }
    }
}

/// Trees grouped by size: entry `n` holds the trees of size `n`.
fn trees_by_size(al: &RankedAlphabet, max_size: usize) -> Result<Vec<Vec<Tree>>, OracleError> {
    leaves(al)?;
    let mut by: Vec<Vec<Tree>> = vec![Vec::new(); max_size + 1];
    let mut total = 0;
    for n in 1..=max_size {
        let mut level = Vec::new();
        for s in al.ids() {
            let r = al.rank(s);
            if r == 0 {
                if n == 1 {
                    level.push(Term::leaf(s));
                }
                continue;
            }
            if n < r + 1 {
                continue;
            }
            let mut comps = Vec::new();
            compositions(n - 1, r, &mut comps);
            for comp in comps {
                let lists: Vec<&[Tree]> = comp.iter().map(|&k| by[k].as_slice()).collect();
                products(&lists, &s, &mut level);
            }
            if total + level.len() > ENUM_CAP {
                return Err(OracleError::CapExceeded(format!("more than {ENUM_CAP} trees")));
            }
        }
        sort_canonical(&mut level, |s| s.0);
        total += level.len();
        by[n] = level;
    }
    Ok(by)
}

/// Every tree of size at most `max_size`, by size and then by the preorder
/// sequence of letter indices.
pub fn enum_trees(al: &RankedAlphabet, max_size: usize) -> Result<Vec<Tree>, OracleError> {
    Ok(trees_by_size(al, max_size)?.into_iter().flatten().collect())
}

/// Every one-hole context of size at most `max_size` (the hole counts as a
/// node), ordered like [`enum_trees`] with the hole after every letter.
pub fn enum_contexts(al: &RankedAlphabet, max_size: usize) -> Result<Vec<Context>, OracleError> {
    leaves(al)?;
    if max_size == 0 {
        return Ok(Vec::new());
    }
    let trees = trees_by_size(al, max_size)?;
    let lifted: Vec<Vec<Term<Slot>>> = trees
        .iter()
        .map(|l| l.iter().map(crate::tree::lift).collect())
        .collect();
    let hole_key = al.len() as u32;
    let mut by: Vec<Vec<Term<Slot>>> = vec![Vec::new(); max_size + 1];
    by[1].push(Term::leaf(Slot::Hole));
    let mut total = 1;
    for n in 2..=max_size {
        let mut level = Vec::new();
        for s in al.ids() {
            let r = al.rank(s);
            if r == 0 || n < r + 1 {
                continue;
            }
            let mut comps = Vec::new();
            compositions(n - 1, r, &mut comps);
            for comp in &comps {
                for h in 0..r {
                    let lists: Vec<&[Term<Slot>]> = comp
                        .iter()
                        .enumerate()
                        .map(|(j, &k)| if j == h { by[k].as_slice() } else { lifted[k].as_slice() })
                        .collect();
                    products(&lists, &Slot::Sym(s), &mut level);
                }
            }
            if total + level.len() > ENUM_CAP {
                return Err(OracleError::CapExceeded(format!("more than {ENUM_CAP} contexts")));
            }
        }
        sort_canonical(&mut level, |l| match l {
            Slot::Sym(s) => s.0,
            Slot::Hole => hole_key,
        });
        total += level.len();
        by[n] = level;
    }
    Ok(by
        .into_iter()
        .flatten()
        .map(|t| Context::from_term(t).expect("one hole by construction"))
        .collect())
}

/// Every run of `a` on `t`, whatever its root state.
pub fn enum_runs(a: &Automaton, t: &Tree) -> Result<Vec<Run>, OracleError> {
    if !a.alphabet().accepts(t) {
        return Err(AutomatonError::AlphabetMismatch.into());
    }
    let by_letter = a.by_letter();
    fn go(a: &Automaton, by_letter: &[Vec<u32>], t: &Tree) -> Result<Vec<Term<StateId>>, OracleError> {
        let kids = t
            .children
            .iter()
            .map(|c| go(a, by_letter, c))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Vec::new();
        for &ti in &by_letter[t.label.index()] {
            let tr = &a.transitions()[ti as usize];
            let lists: Vec<Vec<Term<StateId>>> = kids
                .iter()
                .zip(&tr.children)
                .map(|(runs, &q)| runs.iter().filter(|r| r.label == q).cloned().collect())
                .collect();
            let refs: Vec<&[Term<StateId>]> = lists.iter().map(|l| l.as_slice()).collect();
            products(&refs, &tr.target, &mut out);
            if out.len() > ENUM_CAP {
                return Err(OracleError::CapExceeded(format!("more than {ENUM_CAP} runs")));
            }
        }
        Ok(out)
    }
    let mut runs: Vec<Run> = go(a, &by_letter, t)?.into_iter().map(Run).collect();
    runs.sort();
    Ok(runs)
}

/// Sum of run weights on `c` with `from` at the hole and `to` at the root.
pub fn context_value(a: &Automaton, c: &Context, from: StateId, to: StateId) -> Result<BigUint, OracleError> {
    Ok(a.context_value(c, from, to)?)
}

/// Running maxima of the accepting value: entry `n - 1` is the largest value
/// over trees of size at most `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthCurve {
    pub max_value_by_size: Vec<BigUint>,
}

impl GrowthCurve {
    /// Value at size `n` (1-based).
    pub fn at(&self, n: usize) -> &BigUint {
        &self.max_value_by_size[n - 1]
    }

    /// CSV with header `n,maxValue`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,maxValue\n");
        for (i, v) in self.max_value_by_size.iter().enumerate() {
            s.push_str(&format!("{},{}\n", i + 1, v));
        }
        s
    }
}

pub fn brute_growth(a: &Automaton, max_size: usize) -> Result<GrowthCurve, OracleError> {
    let by = trees_by_size(a.alphabet(), max_size)?;
    let mut best = BigUint::zero();
    let mut curve = Vec::with_capacity(max_size);
    for level in &by[1..] {
        for t in level {
            let v = a.value(t)?.accepting;
            if v > best {
                best = v;
            }
        }
        curve.push(best.clone());
    }
    Ok(GrowthCurve {
        max_value_by_size: curve,
    })
}

/// The first context (in enumeration order) and state with a context value
/// of at least 2 from the state to itself.
pub fn brute_heavy(a: &Automaton, max_context_size: usize) -> Result<Option<(StateId, Context)>, OracleError> {
    let two = BigUint::from(2u32);
    for c in enum_contexts(a.alphabet(), max_context_size)? {
        for q in a.states() {
            if a.context_values(&c, q)?[q.index()] >= two {
                return Ok(Some((q, c)));
            }
        }
    }
    Ok(None)
}

/// All `(q1, q2)`, `q1 ≠ q2`, with one context taking `q1` to `q1`, `q1` to
/// `q2` and `q2` to `q2`.
pub fn brute_barbells(a: &Automaton, max_context_size: usize) -> Result<BarbellSet, OracleError> {
    let n = a.state_count();
    let mut pairs = BTreeSet::new();
    for c in enum_contexts(a.alphabet(), max_context_size)? {
        let rows: Vec<Vec<bool>> = a
            .states()
            .map(|q| {
                a.context_values(&c, q)
                    .map(|v| v.iter().map(|x| !x.is_zero()).collect())
            })
            .collect::<Result<_, _>>()?;
        for q1 in 0..n {
            if !rows[q1][q1] {
                continue;
            }
            for (q2, row) in rows.iter().enumerate() {
                if q2 != q1 && rows[q1][q2] && row[q2] {
                    pairs.insert((StateId(q1 as u32), StateId(q2 as u32)));
                }
            }
        }
    }
    Ok(BarbellSet { pairs })
}

/// Accepting runs summed with their weights, by explicit enumeration.
pub fn value_by_runs(a: &Automaton, t: &Tree) -> Result<BigUint, OracleError> {
    let mut total = BigUint::zero();
    for run in enum_runs(a, t)? {
        if let Some(&w) = a.accepting().get(&run.root()) {
            let mut v = a.run_weight(t, &run)?;
            v *= BigUint::from(w);
            total += v;
        }
    }
    Ok(total)
}

/// Number of accepting runs by explicit enumeration.
pub fn count_runs(a: &Automaton, t: &Tree) -> Result<BigUint, OracleError> {
    let mut total = BigUint::zero();
    for run in enum_runs(a, t)? {
        if a.is_accepting(run.root()) {
            total += BigUint::one();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{print_context, print_tree};

    fn al(symbols: &[(&str, usize)]) -> RankedAlphabet {
        RankedAlphabet::new(symbols.iter().copied()).unwrap()
    }

    #[test]
    fn trees_in_order() {
        let a = al(&[("c", 0)]);
        let ts = enum_trees(&a, 3).unwrap();
        assert_eq!(ts.len(), 1);
        let a = al(&[("b", 1), ("c", 0)]);
        let ts: Vec<String> = enum_trees(&a, 3).unwrap().iter().map(|t| print_tree(t, &a)).collect();
        assert_eq!(ts, ["c", "b(c)", "b(b(c))"]);
    }

    #[test]
    fn tree_counts_follow_recurrence() {
        // T(1) = 1, T(n) = T(n-1) + Σ_{i+j=n-1} T(i) T(j)
        let a = al(&[("a", 2), ("b", 1), ("c", 0)]);
        let mut t = [0u64; 11];
        t[1] = 1;
        for n in 2..=10 {
            t[n] = t[n - 1] + (1..n - 1).map(|i| t[i] * t[n - 1 - i]).sum::<u64>();
        }
        let by = trees_by_size(&a, 10).unwrap();
        for n in 1..=10 {
            assert_eq!(by[n].len() as u64, t[n], "size {n}");
        }
        assert_eq!(enum_trees(&a, 4).unwrap().len(), 8);
    }

    #[test]
    fn trees_are_distinct() {
        let a = al(&[("a", 2), ("b", 1), ("c", 0), ("d", 0)]);
        let ts = enum_trees(&a, 7).unwrap();
        let set: BTreeSet<String> = ts.iter().map(|t| print_tree(t, &a)).collect();
        assert_eq!(set.len(), ts.len());
        assert!(ts.iter().all(|t| t.size() <= 7));
    }

    #[test]
    fn contexts() {
        let a = al(&[("b", 1), ("c", 0)]);
        let cs: Vec<String> = enum_contexts(&a, 2)
            .unwrap()
            .iter()
            .map(|c| print_context(c, &a))
            .collect();
        assert_eq!(cs, ["_HOLE", "b(_HOLE)"]);
        let a = al(&[("a", 2), ("b", 1), ("c", 0)]);
        assert_eq!(enum_contexts(&a, 1).unwrap().len(), 1);
        let cs: Vec<String> = enum_contexts(&a, 3)
            .unwrap()
            .iter()
            .map(|c| print_context(c, &a))
            .collect();
        assert_eq!(cs, ["_HOLE", "b(_HOLE)", "a(c,_HOLE)", "a(_HOLE,c)", "b(b(_HOLE))"]);
    }

    #[test]
    fn context_counts_match_hole_marking() {
        // each context of size n is a tree of size n - 1 + 1 with one leaf
        // replaced; count by marking each c-leaf of trees over {a,b,c}
        let a = al(&[("a", 2), ("b", 1), ("c", 0)]);
        let trees = enum_trees(&a, 7).unwrap();
        let c = a.lookup("c").unwrap();
        let leaves: usize = trees
            .iter()
            .map(|t| t.nodes().iter().filter(|(_, n)| n.label == c).count())
            .sum();
        // hole contexts of size ≤ 7 correspond to c-leaf markings of trees of size ≤ 7
        assert_eq!(enum_contexts(&a, 7).unwrap().len(), leaves);
    }

    #[test]
    fn nullary_required() {
        // alphabets without leaves are already refused on construction
        assert!(RankedAlphabet::new([("b", 1)]).is_err());
    }
}
