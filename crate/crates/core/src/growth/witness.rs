//! Witness families: `C'[C^n[t]]` with value at least `2^n` for exponential
//! automata, and pumping patterns with at least `n^k` runs for polynomial ones.

use std::collections::BTreeMap;

use super::barbell::context_in;
use super::heavy::{scalar_heavy_states, HeavySource, PairGraph};
use super::{
    BarbellSet, DegreeMap, GrowthError, HeavyCycleEvidence, HeavyDetail, PatternLabel, PumpingPattern, Skeleton,
};
use crate::automaton::{Ambiguity, Automaton, MinTrees, StateId};
use crate::tree::{Context, Term, Tree};

/// Pattern terms larger than this are refused.
const PATTERN_CAP: usize = 1 << 20;

/// `q ⇉_C q`, `t` reaches `q` and `q →_{C'} accepting`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpWitness {
    pub state: StateId,
    pub context: Context,
    pub tree: Tree,
    pub outer: Context,
}

impl ExpWitness {
    /// `C'[C^n[t]]`.
    pub fn instance(&self, n: usize) -> Tree {
        self.outer.apply(&self.context.power(n).apply(&self.tree))
    }
}

/// A pumping pattern of maximal degree and a context taking its root state
/// to an accepting state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyWitness {
    pub pattern: PumpingPattern,
    pub outer: Context,
}

impl PolyWitness {
    /// `C'[pump(n, Π)]`.
    pub fn instance(&self, n: usize) -> Tree {
        self.outer.apply(&self.pattern.pump(n))
    }
}

fn failed(what: impl Into<String>) -> GrowthError {
    GrowthError::WitnessReconstructionFailed(what.into())
}

fn min_tree(mins: &MinTrees, q: StateId) -> Result<Tree, GrowthError> {
    mins.tree(q)
        .ok_or_else(|| failed(format!("state {} is not accessible", q.0)))
}

/// Shallow context of transition `t` with the hole at `index`, side children
/// filled by `side(j)` (0-based child position).
fn shallow_with(
    a: &Automaton,
    t: usize,
    index: usize,
    mut side: impl FnMut(usize) -> Result<Tree, GrowthError>,
) -> Result<Context, GrowthError> {
    let tr = &a.transitions()[t];
    let mut trees = Vec::with_capacity(tr.children.len().saturating_sub(1));
    for j in 0..tr.children.len() {
        if j + 1 != index {
            trees.push(side(j)?);
        }
    }
    Ok(Context::shallow(tr.letter, index, trees))
}

/// A shortest context taking `from` at the hole to a state satisfying `goal`
/// at the root.
fn path_context(
    sk: &Skeleton,
    mins: &MinTrees,
    from: StateId,
    goal: impl Fn(StateId) -> bool,
) -> Result<Context, GrowthError> {
    let path = sk
        .shallow
        .graph
        .bfs_path(&[from.index()], |v| goal(StateId(v as u32)), |_| true)
        .ok_or_else(|| failed(format!("no shallow path from state {}", from.0)))?;
    let mut c = Context::hole();
    for e in path {
        let se = sk.shallow.edges[e as usize];
        let children = &sk.a.transitions()[se.transition].children;
        let s = shallow_with(sk.a, se.transition, se.index, |j| min_tree(mins, children[j]))?;
        c = s.compose(&c);
    }
    Ok(c)
}

fn accepting_context(sk: &Skeleton, mins: &MinTrees, q: StateId) -> Result<Context, GrowthError> {
    path_context(sk, mins, q, |p| sk.a.is_accepting(p))
}

/// A tree with a run of weight at least 2 reaching `q`.
fn heavy_tree(sk: &Skeleton, mins: &MinTrees, src: &[Option<HeavySource>], q: StateId) -> Result<Tree, GrowthError> {
    let trs = sk.a.transitions();
    match src[q.index()] {
        None => Err(failed(format!("state {} is not scalar-heavy", q.0))),
        Some(HeavySource::Base(t)) => {
            let tr = &trs[t];
            let children = tr
                .children
                .iter()
                .map(|&c| min_tree(mins, c))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::node(tr.letter, children))
        }
        Some(HeavySource::Step(e)) => {
            let se = sk.shallow.edges[e];
            let children = &trs[se.transition].children;
            let inner = heavy_tree(sk, mins, src, se.from)?;
            let c = shallow_with(sk.a, se.transition, se.index, |j| min_tree(mins, children[j]))?;
            Ok(c.apply(&inner))
        }
    }
}

/// Composes the pair-graph edges along a path, hole side first.
fn pair_path_context(pg: &mut PairGraph, sk: &Skeleton, path: &[u32]) -> Result<Context, GrowthError> {
    let trs = sk.a.transitions();
    let mut c = Context::hole();
    for &e in path {
        let pe = pg.edges[e as usize];
        let (x, y) = (&trs[pe.first], &trs[pe.second]);
        let s = shallow_with(sk.a, pe.first, pe.index, |j| {
            pg.access
                .witness(&[x.children[j], y.children[j]])
                .ok_or_else(|| failed("side pair not accessible"))
        })?;
        c = s.compose(&c);
    }
    Ok(c)
}

fn pair_path(pg: &PairGraph, from: usize, to: usize) -> Result<Vec<u32>, GrowthError> {
    pg.graph
        .bfs_path(&[from], |v| v == to, |_| true)
        .ok_or_else(|| failed("pair graph path missing"))
}

fn diagonal(pg: &PairGraph, q: StateId) -> Result<usize, GrowthError> {
    pg.vertex((q, q)).ok_or_else(|| failed("diagonal vertex missing"))
}

/// The cycle context `C` with `q ⇉_C q`.
fn cycle_context(sk: &Skeleton, mins: &MinTrees, ev: &HeavyCycleEvidence) -> Result<Context, GrowthError> {
    let trs = sk.a.transitions();
    let q = ev.state;
    match ev.detail {
        HeavyDetail::Scalar {
            transition,
            index,
            heavy_side,
            ..
        } => {
            let tr = &trs[transition];
            if tr.target != q {
                return Err(failed("evidence state does not match transition"));
            }
            let src = scalar_heavy_states(sk);
            let s = shallow_with(sk.a, transition, index, |j| {
                if heavy_side == Some(j + 1) {
                    heavy_tree(sk, mins, &src, tr.children[j])
                } else {
                    min_tree(mins, tr.children[j])
                }
            })?;
            let back = path_context(sk, mins, q, |p| p == tr.children[index - 1])?;
            Ok(s.compose(&back))
        }
        HeavyDetail::SideAmbiguousChild {
            transition,
            index,
            side,
        } => {
            let tr = &trs[transition];
            if tr.target != q {
                return Err(failed("evidence state does not match transition"));
            }
            let amb_state = tr.children[side - 1];
            let mut amb = Ambiguity::explore(sk.a, [amb_state]);
            let s = shallow_with(sk.a, transition, index, |j| {
                if j + 1 == side {
                    amb.witness(amb_state)
                        .ok_or_else(|| failed("side child is not ambiguous"))
                } else {
                    min_tree(mins, tr.children[j])
                }
            })?;
            let back = path_context(sk, mins, q, |p| p == tr.children[index - 1])?;
            Ok(s.compose(&back))
        }
        HeavyDetail::Center { off_diagonal, .. } => {
            let mut pg = PairGraph::build(sk);
            let d = diagonal(&pg, q)?;
            let o = pg
                .vertex(off_diagonal)
                .ok_or_else(|| failed("off-diagonal vertex missing"))?;
            let mut path = pair_path(&pg, d, o)?;
            path.extend(pair_path(&pg, o, d)?);
            pair_path_context(&mut pg, sk, &path)
        }
        HeavyDetail::SideDistinct {
            first, second, index, ..
        } => {
            let mut pg = PairGraph::build(sk);
            let d = diagonal(&pg, q)?;
            let e = pg
                .edges
                .iter()
                .position(|pe| pe.first == first && pe.second == second && pe.index == index)
                .ok_or_else(|| failed("pair edge missing"))?;
            let pe = pg.edges[e];
            let mut path = pair_path(&pg, d, pe.from as usize)?;
            path.push(e as u32);
            path.extend(pair_path(&pg, pe.to as usize, d)?);
            pair_path_context(&mut pg, sk, &path)
        }
    }
}

pub(crate) fn exp_witness_in(sk: &Skeleton, ev: &HeavyCycleEvidence) -> Result<ExpWitness, GrowthError> {
    let mins = sk.a.min_trees();
    let context = cycle_context(sk, &mins, ev)?;
    Ok(ExpWitness {
        state: ev.state,
        context,
        tree: min_tree(&mins, ev.state)?,
        outer: accepting_context(sk, &mins, ev.state)?,
    })
}

/// Expands heavy-cycle evidence into `(C, t, C')`.
pub fn exp_witness(a: &Automaton, ev: &HeavyCycleEvidence) -> Result<ExpWitness, GrowthError> {
    exp_witness_in(&Skeleton::new(a)?, ev)
}

struct Patterns<'s, 'a> {
    sk: &'s Skeleton<'a>,
    deg: &'s DegreeMap,
    barbells: &'s BarbellSet,
    mins: MinTrees,
    memo: Vec<Option<Term<PatternLabel>>>,
    pumps: BTreeMap<(StateId, StateId), Context>,
}

impl Patterns<'_, '_> {
    fn get(&mut self, q: StateId) -> Result<Term<PatternLabel>, GrowthError> {
        if let Some(t) = &self.memo[q.index()] {
            return Ok(t.clone());
        }
        let t = self.build(q)?;
        if t.size() > PATTERN_CAP {
            return Err(failed("pumping pattern too large"));
        }
        self.memo[q.index()] = Some(t.clone());
        Ok(t)
    }

    fn build(&mut self, q: StateId) -> Result<Term<PatternLabel>, GrowthError> {
        let d = self.deg.of(q);
        if d == 0 {
            let t = min_tree(&self.mins, q)?;
            return Ok(t.map(&mut |&s| PatternLabel::Sym(s)));
        }
        let settled = &self.deg.settled;
        let earlier = |p: StateId| settled[p.index()] < settled[q.index()];
        let a = self.sk.a;
        let trigger = a.transitions().iter().position(|t| {
            t.target == q
                && t.children.iter().all(|&c| earlier(c))
                && t.children.iter().map(|&c| self.deg.of(c)).sum::<u64>() == d
        });
        if let Some(ti) = trigger {
            let tr = &a.transitions()[ti];
            let mut children = Vec::with_capacity(tr.children.len());
            for &c in &tr.children {
                children.push(self.get(c)?);
            }
            return Ok(Term::node(PatternLabel::Sym(tr.letter), children));
        }
        let from = self
            .barbells
            .pairs
            .iter()
            .find(|&&(p, r)| r == q && earlier(p) && self.deg.of(p) + 1 == d)
            .map(|&(p, _)| p)
            .ok_or_else(|| failed(format!("no trigger for state {}", q.0)))?;
        let inner = self.get(from)?;
        let c = match self.pumps.get(&(from, q)) {
            Some(c) => c.clone(),
            None => {
                let c = context_in(self.sk, from, q)?;
                self.pumps.insert((from, q), c.clone());
                c
            }
        };
        Ok(Term::node(PatternLabel::Pump(c), vec![inner]))
    }
}

pub(crate) fn poly_witness_in(
    sk: &Skeleton,
    deg: &DegreeMap,
    barbells: &BarbellSet,
) -> Result<PolyWitness, GrowthError> {
    let a = sk.a;
    let root = a
        .states()
        .max_by_key(|&q| (deg.of(q), std::cmp::Reverse(q)))
        .ok_or_else(|| failed("no states"))?;
    let mut p = Patterns {
        sk,
        deg,
        barbells,
        mins: a.min_trees(),
        memo: vec![None; a.state_count()],
        pumps: BTreeMap::new(),
    };
    let term = p.get(root)?;
    let outer = accepting_context(sk, &p.mins, root)?;
    Ok(PolyWitness {
        pattern: PumpingPattern { term, root },
        outer,
    })
}

/// A pumping pattern of maximal degree with its accepting context.
pub fn poly_witness(a: &Automaton, deg: &DegreeMap, barbells: &BarbellSet) -> Result<PolyWitness, GrowthError> {
    let sk = Skeleton::new(a)?;
    if super::heavy::find(&sk).is_some() {
        return Err(GrowthError::HeavyCyclePresent);
    }
    poly_witness_in(&sk, deg, barbells)
}
