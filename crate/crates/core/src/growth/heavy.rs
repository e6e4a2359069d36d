//! The three heavy-cycle detectors.

use rustc_hash::FxHashMap;

use super::{GrowthError, HeavyCycleEvidence, HeavyDetail, HeavyKind, Skeleton};
use crate::automaton::{Ambiguity, Automaton, StateId, TupleAccess};
use crate::graph::{Digraph, Sccs};

/// Why a state is scalar-heavy: a weight-≥2 transition into it, or a
/// shallow edge from another scalar-heavy state.
#[derive(Clone, Copy, Debug)]
pub(crate) enum HeavySource {
    Base(usize),
    Step(usize),
}

pub(crate) fn scalar_heavy_states(sk: &Skeleton) -> Vec<Option<HeavySource>> {
    let a = sk.a;
    let mut src: Vec<Option<HeavySource>> = vec![None; a.state_count()];
    let mut queue = Vec::new();
    for (ti, t) in a.transitions().iter().enumerate() {
        if t.weight >= 2 && src[t.target.index()].is_none() {
            src[t.target.index()] = Some(HeavySource::Base(ti));
            queue.push(t.target.index());
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for &(w, e) in sk.shallow.graph.out(v) {
            if src[w as usize].is_none() {
                src[w as usize] = Some(HeavySource::Step(e as usize));
                queue.push(w as usize);
            }
        }
    }
    src
}

fn scalar(sk: &Skeleton) -> Option<HeavyCycleEvidence> {
    let heavy = scalar_heavy_states(sk);
    for (ti, t) in sk.a.transitions().iter().enumerate() {
        for i in 1..=t.children.len() {
            if !sk.spine_cyclic(ti, i) {
                continue;
            }
            let heavy_side = if t.weight >= 2 {
                None
            } else {
                match (1..=t.children.len()).find(|&j| j != i && heavy[t.children[j - 1].index()].is_some()) {
                    Some(j) => Some(j),
                    None => continue,
                }
            };
            return Some(HeavyCycleEvidence {
                kind: HeavyKind::ScalarHeavy,
                state: t.target,
                detail: HeavyDetail::Scalar {
                    component: sk.comp(t.target),
                    transition: ti,
                    index: i,
                    heavy_side,
                },
            });
        }
    }
    None
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct PairEdge {
    pub from: u32,
    pub to: u32,
    pub first: usize,
    pub second: usize,
    /// 1-based hole position.
    pub index: usize,
}

/// The shallow digraph of `A × A`, restricted to pairs inside one component
/// of the shallow digraph of `A` and to cyclic spine positions, with side
/// children required to be pair-accessible.
pub(crate) struct PairGraph {
    pub verts: Vec<(StateId, StateId)>,
    pub index: FxHashMap<(StateId, StateId), u32>,
    pub edges: Vec<PairEdge>,
    pub graph: Digraph,
    pub scc: Sccs,
    pub access: TupleAccess<2>,
}

/// Spine-cyclic `(transition, index)` occurrences grouped by letter, hole
/// position and component, in order of first appearance.
pub(crate) fn cyclic_groups(sk: &Skeleton) -> Vec<(usize, Vec<usize>)> {
    let mut slot: FxHashMap<(u32, usize, usize), usize> = FxHashMap::default();
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (ti, t) in sk.a.transitions().iter().enumerate() {
        for i in 1..=t.children.len() {
            if sk.spine_cyclic(ti, i) {
                let key = (t.letter.0, i, sk.comp(t.target));
                let g = *slot.entry(key).or_insert_with(|| {
                    groups.push((i, Vec::new()));
                    groups.len() - 1
                });
                groups[g].1.push(ti);
            }
        }
    }
    groups
}

impl PairGraph {
    pub fn build(sk: &Skeleton) -> Self {
        let a = sk.a;
        let trs = a.transitions();
        let groups = cyclic_groups(sk);
        let mut goals = Vec::new();
        for (i, g) in &groups {
            for &t1 in g {
                for &t2 in g {
                    for j in 0..trs[t1].children.len() {
                        if j + 1 != *i {
                            goals.push([trs[t1].children[j], trs[t2].children[j]]);
                        }
                    }
                }
            }
        }
        let access = TupleAccess::<2>::explore(a, goals);
        let mut verts = Vec::new();
        let mut index: FxHashMap<(StateId, StateId), u32> = FxHashMap::default();
        let mut intern = |p: (StateId, StateId), verts: &mut Vec<(StateId, StateId)>| {
            *index.entry(p).or_insert_with(|| {
                verts.push(p);
                verts.len() as u32 - 1
            })
        };
        let mut pairs = Vec::new();
        let mut edges = Vec::new();
        for (i, g) in &groups {
            let i = *i;
            for &t1 in g {
                for &t2 in g {
                    let (x, y) = (&trs[t1], &trs[t2]);
                    let sides_ok = (0..x.children.len())
                        .filter(|&j| j + 1 != i)
                        .all(|j| access.accessible(&[x.children[j], y.children[j]]));
                    if !sides_ok {
                        continue;
                    }
                    let from = intern((x.children[i - 1], y.children[i - 1]), &mut verts);
                    let to = intern((x.target, y.target), &mut verts);
                    pairs.push((from, to));
                    edges.push(PairEdge {
                        from,
                        to,
                        first: t1,
                        second: t2,
                        index: i,
                    });
                }
            }
        }
        let graph = Digraph::new(verts.len(), &pairs);
        let scc = Sccs::of(&graph);
        PairGraph {
            verts,
            index,
            edges,
            graph,
            scc,
            access,
        }
    }

    pub fn vertex(&self, p: (StateId, StateId)) -> Option<usize> {
        self.index.get(&p).map(|&v| v as usize)
    }

    /// For each component, the smallest diagonal state it contains.
    pub fn diagonal_of_comp(&self) -> Vec<Option<StateId>> {
        let mut out: Vec<Option<StateId>> = vec![None; self.scc.count];
        for (v, &(x, y)) in self.verts.iter().enumerate() {
            if x == y {
                let c = self.scc.comp[v] as usize;
                if out[c].is_none_or(|q| x < q) {
                    out[c] = Some(x);
                }
            }
        }
        out
    }
}

fn center(pg: &PairGraph) -> Option<HeavyCycleEvidence> {
    let diag = pg.diagonal_of_comp();
    let mut off: Vec<Option<(StateId, StateId)>> = vec![None; pg.scc.count];
    for (v, &(x, y)) in pg.verts.iter().enumerate() {
        if x != y {
            let c = pg.scc.comp[v] as usize;
            if off[c].is_none_or(|p| (x, y) < p) {
                off[c] = Some((x, y));
            }
        }
    }
    let mut best: Option<(StateId, usize)> = None;
    for c in 0..pg.scc.count {
        if let (Some(q), Some(_)) = (diag[c], off[c]) {
            if best.is_none_or(|(b, _)| q < b) {
                best = Some((q, c));
            }
        }
    }
    best.map(|(q, c)| HeavyCycleEvidence {
        kind: HeavyKind::CenterAmbiguous,
        state: q,
        detail: HeavyDetail::Center {
            component: c,
            off_diagonal: off[c].expect("checked"),
        },
    })
}

fn side_distinct(a: &Automaton, pg: &PairGraph) -> Option<HeavyCycleEvidence> {
    let diag = pg.diagonal_of_comp();
    let trs = a.transitions();
    for v in 0..pg.graph.len() {
        for &(w, e) in pg.graph.out(v) {
            let c = pg.scc.comp[v];
            if c != pg.scc.comp[w as usize] {
                continue;
            }
            let Some(q) = diag[c as usize] else { continue };
            let pe = pg.edges[e as usize];
            if pe.first == pe.second {
                continue;
            }
            let (x, y) = (&trs[pe.first], &trs[pe.second]);
            if let Some(j) = (1..=x.children.len()).find(|&j| j != pe.index && x.children[j - 1] != y.children[j - 1]) {
                return Some(HeavyCycleEvidence {
                    kind: HeavyKind::SideAmbiguous,
                    state: q,
                    detail: HeavyDetail::SideDistinct {
                        first: pe.first,
                        second: pe.second,
                        index: pe.index,
                        side: j,
                    },
                });
            }
        }
    }
    None
}

fn side_ambiguous_child(sk: &Skeleton) -> Option<HeavyCycleEvidence> {
    let trs = sk.a.transitions();
    let mut goals = Vec::new();
    for (ti, t) in trs.iter().enumerate() {
        if (1..=t.children.len()).any(|i| sk.spine_cyclic(ti, i)) {
            goals.extend(t.children.iter().copied());
        }
    }
    if goals.is_empty() {
        return None;
    }
    goals.sort_unstable();
    goals.dedup();
    let amb = Ambiguity::explore(sk.a, goals);
    for (ti, t) in trs.iter().enumerate() {
        for i in 1..=t.children.len() {
            if !sk.spine_cyclic(ti, i) {
                continue;
            }
            if let Some(j) = (1..=t.children.len()).find(|&j| j != i && amb.is_ambiguous(t.children[j - 1])) {
                return Some(HeavyCycleEvidence {
                    kind: HeavyKind::SideAmbiguous,
                    state: t.target,
                    detail: HeavyDetail::SideAmbiguousChild {
                        transition: ti,
                        index: i,
                        side: j,
                    },
                });
            }
        }
    }
    None
}

fn side(sk: &Skeleton, pg: &PairGraph) -> Option<HeavyCycleEvidence> {
    side_ambiguous_child(sk).or_else(|| side_distinct(sk.a, pg))
}

pub(crate) fn find(sk: &Skeleton) -> Option<HeavyCycleEvidence> {
    if let Some(ev) = scalar(sk) {
        return Some(ev);
    }
    let pg = PairGraph::build(sk);
    center(&pg).or_else(|| side(sk, &pg))
}

/// A cycle carrying a single run of weight at least 2.
pub fn detect_scalar_heavy(a: &Automaton) -> Result<Option<HeavyCycleEvidence>, GrowthError> {
    Ok(scalar(&Skeleton::new(a)?))
}

/// Two runs around a cycle that differ on the hole-to-root path.
pub fn detect_center_ambiguous(a: &Automaton) -> Result<Option<HeavyCycleEvidence>, GrowthError> {
    let sk = Skeleton::new(a)?;
    Ok(center(&PairGraph::build(&sk)))
}

/// Two runs around a cycle that differ below a node off the hole-to-root path.
pub fn detect_side_ambiguous(a: &Automaton) -> Result<Option<HeavyCycleEvidence>, GrowthError> {
    let sk = Skeleton::new(a)?;
    Ok(side(&sk, &PairGraph::build(&sk)))
}

/// The first heavy cycle found, trying scalar, center and side in turn.
pub fn has_heavy_cycle(a: &Automaton) -> Result<Option<HeavyCycleEvidence>, GrowthError> {
    Ok(find(&Skeleton::new(a)?))
}
