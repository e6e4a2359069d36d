//! Compact directed graphs, strongly connected components and shortest paths.

use std::collections::VecDeque;

/// Adjacency in compressed sparse row form. Edge ids are positions in the
/// original edge list, so callers can attach data to edges by id.
#[derive(Clone, Debug)]
pub struct Digraph {
    n: usize,
    start: Vec<u32>,
    adj: Vec<(u32, u32)>,
}

impl Digraph {
    /// Builds from `(source, target)` pairs; successors keep input order.
    pub fn new(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut start = vec![0u32; n + 1];
        for &(s, _) in edges {
            start[s as usize + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut adj = vec![(0u32, 0u32); edges.len()];
        for (id, &(s, t)) in edges.iter().enumerate() {
            adj[fill[s as usize] as usize] = (t, id as u32);
            fill[s as usize] += 1;
        }
        Digraph { n, start, adj }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len()
    }

    /// `(target, edge id)` pairs leaving `v`.
    pub fn out(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[self.start[v] as usize..self.start[v + 1] as usize]
    }

    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out(v).iter().map(|&(t, _)| t as usize)
    }

    pub fn reversed(&self) -> Digraph {
        let mut edges = vec![(0u32, 0u32); self.adj.len()];
        for v in 0..self.n {
            for &(t, id) in self.out(v) {
                edges[id as usize] = (t, v as u32);
            }
        }
        Digraph::new(self.n, &edges)
    }

    /// Vertices reachable from `sources`, sources included.
    pub fn reachable(&self, sources: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack: Vec<usize> = Vec::new();
        for s in sources {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(v) = stack.pop() {
            for w in self.successors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Shortest path (as edge ids) from any vertex in `from` to a vertex
    /// satisfying `goal`, using only edges accepted by `allow`. Ties go to the
    /// lowest vertex, then to the earliest edge.
    pub fn bfs_path(
        &self,
        from: &[usize],
        goal: impl Fn(usize) -> bool,
        allow: impl Fn(u32) -> bool,
    ) -> Option<Vec<u32>> {
        let mut pred: Vec<Option<(u32, u32)>> = vec![None; self.n];
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        let mut sources = from.to_vec();
        sources.sort_unstable();
        for s in sources {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            if goal(v) {
                let mut path = Vec::new();
                let mut cur = v;
                while let Some((p, e)) = pred[cur] {
                    path.push(e);
                    cur = p as usize;
                }
                path.reverse();
                return Some(path);
            }
            for &(w, e) in self.out(v) {
                if allow(e) && !seen[w as usize] {
                    seen[w as usize] = true;
                    pred[w as usize] = Some((v as u32, e));
                    queue.push_back(w as usize);
                }
            }
        }
        None
    }
}

/// Strongly connected components. Components are numbered in the order
/// Tarjan's algorithm completes them, which is a reverse topological order:
/// every edge goes from a component to one with an equal or smaller number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sccs {
    pub comp: Vec<u32>,
    pub count: usize,
}

impl Sccs {
    pub fn of(g: &Digraph) -> Self {
        tarjan(g)
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.comp[a] == self.comp[b]
    }

    /// Members of each component, in increasing vertex order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.comp.iter().enumerate() {
            out[c as usize].push(v);
        }
        out
    }

    /// Whether each component contains a cycle (two vertices, or a self-loop).
    pub fn cyclic(&self, g: &Digraph) -> Vec<bool> {
        let mut size = vec![0usize; self.count];
        for &c in &self.comp {
            size[c as usize] += 1;
        }
        let mut cyc: Vec<bool> = size.iter().map(|&s| s > 1).collect();
        for v in 0..g.len() {
            if g.successors(v).any(|w| w == v) {
                cyc[self.comp[v] as usize] = true;
            }
        }
        cyc
    }
}

fn tarjan(g: &Digraph) -> Sccs {
    const UNSEEN: u32 = u32::MAX;
    let n = g.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, u32)> = Vec::new();
    let mut next_index = 0u32;
    let mut count = 0u32;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root as u32, 0));
        while let Some(top) = call.len().checked_sub(1) {
            let (v, pos) = call[top];
            let v = v as usize;
            if pos == 0 && index[v] == UNSEEN {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v as u32);
                on_stack[v] = true;
            }
            let out = g.out(v);
            if (pos as usize) < out.len() {
                let w = out[pos as usize].0 as usize;
                call[top].1 += 1;
                if index[w] == UNSEEN {
                    call.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                let p = parent as usize;
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack") as usize;
                    on_stack[w] = false;
                    comp[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    Sccs {
        comp,
        count: count as usize,
    }
}

/// Reachability between components of a condensation, as bitsets.
#[derive(Clone, Debug)]
pub struct ComponentReach {
    words: usize,
    bits: Vec<u64>,
}

impl ComponentReach {
    pub fn new(g: &Digraph, sccs: &Sccs) -> Self {
        let c = sccs.count;
        let words = c.div_ceil(64).max(1);
        let mut bits = vec![0u64; words * c];
        let members = sccs.members();
        // successors always carry smaller numbers, so increasing order works
        for comp in 0..c {
            bits[comp * words + comp / 64] |= 1 << (comp % 64);
            for &v in &members[comp] {
                for w in g.successors(v) {
                    let d = sccs.comp[w] as usize;
                    if d != comp {
                        let (lo, hi) = bits.split_at_mut(comp * words);
                        let row = &mut hi[..words];
                        let src = &lo[d * words..d * words + words];
                        for (x, y) in row.iter_mut().zip(src) {
                            *x |= *y;
                        }
                    }
                }
            }
        }
        ComponentReach { words, bits }
    }

    /// Whether component `to` is reachable from component `from`.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        self.bits[from * self.words + to / 64] >> (to % 64) & 1 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgeless_graph_has_singletons() {
        let g = Digraph::new(3, &[]);
        let s = Sccs::of(&g);
        assert_eq!(s.count, 3);
        assert_eq!(s.cyclic(&g), vec![false; 3]);
    }

    #[test]
    fn self_loop_is_cyclic() {
        let g = Digraph::new(1, &[(0, 0)]);
        let s = Sccs::of(&g);
        assert_eq!(s.count, 1);
        assert_eq!(s.cyclic(&g), vec![true]);
    }

    #[test]
    fn numbering_is_reverse_topological() {
        // 0 -> 1 <-> 2 -> 3
        let g = Digraph::new(4, &[(0, 1), (1, 2), (2, 1), (2, 3)]);
        let s = Sccs::of(&g);
        assert_eq!(s.count, 3);
        assert!(s.same(1, 2));
        for v in 0..4 {
            for w in g.successors(v) {
                assert!(s.comp[w] <= s.comp[v]);
            }
        }
        let r = ComponentReach::new(&g, &s);
        let c = |v: usize| s.comp[v] as usize;
        assert!(r.reaches(c(0), c(3)));
        assert!(r.reaches(c(1), c(1)));
        assert!(!r.reaches(c(3), c(0)));
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 200_000;
        let edges: Vec<(u32, u32)> = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
        let g = Digraph::new(n, &edges);
        assert_eq!(Sccs::of(&g).count, n);
    }

    #[test]
    fn bfs_finds_shortest() {
        let g = Digraph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        assert_eq!(g.bfs_path(&[0], |v| v == 3, |_| true), Some(vec![3]));
        assert_eq!(g.bfs_path(&[0], |v| v == 3, |e| e != 3), Some(vec![0, 1, 2]));
        assert_eq!(g.bfs_path(&[3], |v| v == 0, |_| true), None);
    }
}
