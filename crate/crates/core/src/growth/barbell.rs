//! Barbells `q1 ⇛ q2`, found in the shallow digraph of `A × A × A` extended
//! with the edges `(q, q', q') -> (q, q, q')`.
//!
//! Along a cycle of the extended graph the first coordinate stays in one
//! component `S1` of the shallow digraph of `A` and the third in one
//! component `S3`, so the graph is built block by block, one block per pair
//! `(S1, S3)` with `S1` reaching `S3`.

use rustc_hash::{FxHashMap, FxHashSet};

use super::heavy::cyclic_groups;
use super::{BarbellSet, GrowthError, Skeleton};
use crate::automaton::{Automaton, StateId, TupleAccess};
use crate::graph::{ComponentReach, Digraph, Sccs};
use crate::tree::{Context, SymbolId};

type Triple = [StateId; 3];

#[derive(Clone, Copy, Debug)]
struct TripleEdge {
    first: usize,
    second: usize,
    third: usize,
    index: usize,
}

struct Layout<'s, 'a> {
    sk: &'s Skeleton<'a>,
    reach: ComponentReach,
    /// Per component: `(letter, hole index, cyclic transitions)`.
    groups: Vec<Vec<(SymbolId, usize, Vec<usize>)>>,
    by_letter: Vec<Vec<u32>>,
}

impl<'s, 'a> Layout<'s, 'a> {
    fn new(sk: &'s Skeleton<'a>) -> Self {
        let trs = sk.a.transitions();
        let mut groups: Vec<Vec<(SymbolId, usize, Vec<usize>)>> = vec![Vec::new(); sk.scc.count];
        for (i, g) in cyclic_groups(sk) {
            let t = &trs[g[0]];
            groups[sk.comp(t.target)].push((t.letter, i, g));
        }
        Layout {
            sk,
            reach: ComponentReach::new(&sk.shallow.graph, &sk.scc),
            groups,
            by_letter: sk.a.by_letter(),
        }
    }

    fn blocks(&self) -> Vec<(usize, usize)> {
        let n = self.groups.len();
        let mut out = Vec::new();
        for s1 in 0..n {
            if self.groups[s1].is_empty() {
                continue;
            }
            for s3 in 0..n {
                if !self.groups[s3].is_empty() && self.reach.reaches(s1, s3) {
                    out.push((s1, s3));
                }
            }
        }
        out
    }

    fn for_each_edge(&self, s1: usize, s3: usize, mut f: impl FnMut(TripleEdge)) {
        let trs = self.sk.a.transitions();
        for (letter, i, g1) in &self.groups[s1] {
            let Some((_, _, g3)) = self.groups[s3].iter().find(|(l, j, _)| l == letter && j == i) else {
                continue;
            };
            for &t2 in &self.by_letter[letter.index()] {
                let m = &trs[t2 as usize];
                if !self.reach.reaches(s1, self.sk.comp(m.children[i - 1]))
                    || !self.reach.reaches(self.sk.comp(m.target), s3)
                {
                    continue;
                }
                for &t1 in g1 {
                    for &t3 in g3 {
                        f(TripleEdge {
                            first: t1,
                            second: t2 as usize,
                            third: t3,
                            index: *i,
                        });
                    }
                }
            }
        }
    }

    fn sides(&self, e: TripleEdge, mut f: impl FnMut(Triple)) {
        let trs = self.sk.a.transitions();
        let (x, y, z) = (&trs[e.first], &trs[e.second], &trs[e.third]);
        for j in 0..x.children.len() {
            if j + 1 != e.index {
                f([x.children[j], y.children[j], z.children[j]]);
            }
        }
    }

    fn goals(&self, blocks: &[(usize, usize)]) -> Vec<Triple> {
        let mut seen = FxHashSet::default();
        for &(s1, s3) in blocks {
            self.for_each_edge(s1, s3, |e| {
                self.sides(e, |t| {
                    seen.insert(t);
                })
            });
        }
        let mut goals: Vec<Triple> = seen.into_iter().collect();
        goals.sort_unstable();
        goals
    }
}

/// One block of the extended triple graph. Edge ids below `real` are edges
/// of the shallow digraph of `A × A × A`; the rest are added edges.
struct Block {
    verts: Vec<Triple>,
    index: FxHashMap<Triple, u32>,
    edges: Vec<TripleEdge>,
    graph: Digraph,
    real: usize,
}

impl Block {
    fn build(layout: &Layout, access: &TupleAccess<3>, s1: usize, s3: usize) -> Block {
        let trs = layout.sk.a.transitions();
        let mut verts = Vec::new();
        let mut index: FxHashMap<Triple, u32> = FxHashMap::default();
        let mut pairs = Vec::new();
        let mut edges = Vec::new();
        let mut intern = |t: Triple, verts: &mut Vec<Triple>| {
            *index.entry(t).or_insert_with(|| {
                verts.push(t);
                verts.len() as u32 - 1
            })
        };
        layout.for_each_edge(s1, s3, |e| {
            let mut ok = true;
            layout.sides(e, |t| ok &= access.accessible(&t));
            if !ok {
                return;
            }
            let (x, y, z) = (&trs[e.first], &trs[e.second], &trs[e.third]);
            let i = e.index - 1;
            let from = intern([x.children[i], y.children[i], z.children[i]], &mut verts);
            let to = intern([x.target, y.target, z.target], &mut verts);
            pairs.push((from, to));
            edges.push(e);
        });
        let real = pairs.len();
        for (v, t) in verts.iter().enumerate() {
            if t[1] == t[2] {
                if let Some(&w) = index.get(&[t[0], t[0], t[1]]) {
                    if w as usize != v {
                        pairs.push((v as u32, w));
                    }
                }
            }
        }
        let graph = Digraph::new(verts.len(), &pairs);
        Block {
            verts,
            index,
            edges,
            graph,
            real,
        }
    }

    fn pairs(&self, out: &mut FxHashSet<(StateId, StateId)>) {
        let scc = Sccs::of(&self.graph);
        let mut has_real = vec![false; scc.count];
        for v in 0..self.graph.len() {
            for &(w, e) in self.graph.out(v) {
                if (e as usize) < self.real && scc.comp[v] == scc.comp[w as usize] {
                    has_real[scc.comp[v] as usize] = true;
                }
            }
        }
        for (v, t) in self.verts.iter().enumerate() {
            if t[0] == t[1] && t[1] != t[2] {
                if let Some(&w) = self.index.get(&[t[0], t[2], t[2]]) {
                    let c = scc.comp[v];
                    if c == scc.comp[w as usize] && has_real[c as usize] {
                        out.insert((t[0], t[2]));
                    }
                }
            }
        }
    }
}

pub(crate) fn compute(sk: &Skeleton) -> BarbellSet {
    let layout = Layout::new(sk);
    let blocks = layout.blocks();
    let access = TupleAccess::<3>::explore(sk.a, layout.goals(&blocks));
    let mut found = FxHashSet::default();
    for (s1, s3) in blocks {
        Block::build(&layout, &access, s1, s3).pairs(&mut found);
    }
    BarbellSet {
        pairs: found.into_iter().collect(),
    }
}

/// A shortest context `C` with `q1 →C q1`, `q1 →C q2` and `q2 →C q2`.
pub(crate) fn context_in(sk: &Skeleton, q1: StateId, q2: StateId) -> Result<Context, GrowthError> {
    let fail = || {
        GrowthError::WitnessReconstructionFailed(format!(
            "no barbell from {} to {}",
            sk.a.state_name(q1),
            sk.a.state_name(q2)
        ))
    };
    let layout = Layout::new(sk);
    let (s1, s3) = (sk.comp(q1), sk.comp(q2));
    if q1 == q2 || layout.groups[s1].is_empty() || !layout.reach.reaches(s1, s3) {
        return Err(fail());
    }
    let mut access = TupleAccess::<3>::explore(sk.a, layout.goals(&[(s1, s3)]));
    let block = Block::build(&layout, &access, s1, s3);
    let start = *block.index.get(&[q1, q1, q2]).ok_or_else(fail)?;
    let goal = *block.index.get(&[q1, q2, q2]).ok_or_else(fail)?;
    let path = block
        .graph
        .bfs_path(&[start as usize], |v| v == goal as usize, |e| (e as usize) < block.real)
        .ok_or_else(fail)?;
    let trs = sk.a.transitions();
    let mut c = Context::hole();
    for e in path {
        let te = block.edges[e as usize];
        let mut side = Vec::new();
        let mut missing = false;
        layout.sides(te, |t| match access.witness(&t) {
            Some(w) => side.push(w),
            None => missing = true,
        });
        if missing {
            return Err(fail());
        }
        c = Context::shallow(trs[te.first].letter, te.index, side).compose(&c);
    }
    Ok(c)
}

/// All pairs `(q1, q2)` with `q1 ⇛ q2`.
pub fn barbell_pairs(a: &Automaton) -> Result<BarbellSet, GrowthError> {
    Ok(compute(&Skeleton::new(a)?))
}

/// A context witnessing `q1 ⇛ q2`.
pub fn barbell_context(a: &Automaton, q1: StateId, q2: StateId) -> Result<Context, GrowthError> {
    context_in(&Skeleton::new(a)?, q1, q2)
}
