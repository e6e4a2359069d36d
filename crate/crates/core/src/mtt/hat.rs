//! The annotated transducer `T̃`.
//!
//! An annotated letter `a^ρ` picks, for every state `q` and every
//! `α ∈ {✠, y1, ..., y_rank(q)}`, one α-branch of `RHS(q, a)` (or `✠`).
//! `T̃` has a rank-0 state `q^✠` and rank-1 states `q^{y_i}` for every `q`,
//! and on `a^ρ` the state `q^α` outputs the chosen branch. Its outputs are
//! branches of the output of `T` on the projected input, and some annotation
//! reaches a branch of maximum length.
//!
//! The annotated alphabet is far too large to list for most transducers, so
//! annotations are indexed lazily: `ρ` is a vector of positions into the
//! per-(letter, slot) choice lists.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;
use rustc_hash::FxHashSet;

use super::branch::{branches, rhs_branches, BranchAlphabet, BranchKind, BranchLabel, RhsBranch};
use super::eval::mtt_eval_with;
use super::{Mtt, MttError, MttState, Rhs, RhsLabel};
use crate::tree::{RankedAlphabet, SymbolId, Term, Tree};

/// `✠` or the parameter `y_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alpha {
    End,
    Y(usize),
}

/// `a^ρ`; `rho[s]` indexes [`Hat::choices`] of `a` at slot `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnnotatedSymbol {
    pub letter: SymbolId,
    pub rho: Vec<u32>,
}

pub struct Hat<'m> {
    mtt: &'m Mtt,
    ba: BranchAlphabet,
    /// States of `T̃` as `(q, α)`; `(q0, ✠)` first.
    slots: Vec<(usize, Alpha)>,
    /// `choices[a][s]`
    choices: Vec<Vec<Vec<RhsBranch>>>,
}

pub fn hat(m: &Mtt) -> Hat<'_> {
    let mut slots = Vec::new();
    for (q, s) in m.states.iter().enumerate() {
        slots.push((q, Alpha::End));
        slots.extend((1..=s.rank).map(|i| (q, Alpha::Y(i))));
    }
    let mut choices = Vec::with_capacity(m.input.len());
    for a in m.input.ids() {
        let mut per_slot = Vec::with_capacity(slots.len());
        for &(q, alpha) in &slots {
            let all = rhs_branches(m.rhs(q, a));
            let list: Vec<RhsBranch> = match alpha {
                Alpha::End => all
                    .into_iter()
                    .filter(|b| BranchKind::of(b) == BranchKind::End)
                    .collect(),
                Alpha::Y(i) => {
                    let mut l: Vec<RhsBranch> = all
                        .into_iter()
                        .filter(|b| BranchKind::of(b) == BranchKind::Param(i))
                        .collect();
                    l.push(Term::leaf(BranchLabel::End));
                    l
                }
            };
            per_slot.push(list);
        }
        choices.push(per_slot);
    }
    Hat {
        mtt: m,
        ba: BranchAlphabet::new(&m.output),
        slots,
        choices,
    }
}

/// A unary output under construction; `open` when it ends in `y1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Val {
    path: Vec<SymbolId>,
    open: bool,
}

impl<'m> Hat<'m> {
    pub fn base(&self) -> &'m Mtt {
        self.mtt
    }

    pub fn branch_alphabet(&self) -> &BranchAlphabet {
        &self.ba
    }

    /// `Q'`, root first.
    pub fn states(&self) -> &[(usize, Alpha)] {
        &self.slots
    }

    pub fn state_name(&self, s: usize) -> String {
        let (q, alpha) = self.slots[s];
        let name = &self.mtt.states[q].name;
        match alpha {
            Alpha::End => format!("{name}_END"),
            Alpha::Y(i) => format!("{name}_y{i}"),
        }
    }

    pub fn slot(&self, q: usize, alpha: Alpha) -> usize {
        self.slots.iter().position(|&s| s == (q, alpha)).expect("slot exists")
    }

    /// The values `ρ_{q,α}` may take on letter `a` at slot `s`.
    pub fn choices(&self, a: SymbolId, s: usize) -> &[RhsBranch] {
        &self.choices[a.index()][s]
    }

    /// Number of annotations `a^ρ` of `a`.
    pub fn annotation_count(&self, a: SymbolId) -> BigUint {
        self.choices[a.index()]
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.len()))
    }

    /// All `a^ρ`, the last slot varying fastest.
    pub fn annotations(&self, a: SymbolId) -> impl Iterator<Item = AnnotatedSymbol> + '_ {
        let radix: Vec<u32> = self.choices[a.index()].iter().map(|l| l.len() as u32).collect();
        let mut next = Some(vec![0u32; radix.len()]);
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut succ = cur.clone();
            let mut k = succ.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                succ[k] += 1;
                if succ[k] < radix[k] {
                    next = Some(succ);
                    break;
                }
                succ[k] = 0;
            }
            Some(AnnotatedSymbol { letter: a, rho: cur })
        })
    }

    /// `π_*`.
    pub fn project(&self, t: &Term<AnnotatedSymbol>) -> Tree {
        t.map(&mut |s| s.letter)
    }

    fn run(&self, b: &RhsBranch, kids: &[&[Val]]) -> Val {
        let mut path = Vec::new();
        let mut t = b;
        loop {
            match t.label {
                BranchLabel::Hat(a) => {
                    path.push(self.ba.hat(a).expect("hatted letters have positive rank"));
                    t = &t.children[0];
                }
                BranchLabel::End => return Val { path, open: false },
                BranchLabel::Param(_) => return Val { path, open: true },
                BranchLabel::CallEnd { state, var } => {
                    let v = &kids[var - 1][self.slot(state, Alpha::End)];
                    path.extend_from_slice(&v.path);
                    return Val { path, open: false };
                }
                BranchLabel::CallParam { state, param, var } => {
                    let v = &kids[var - 1][self.slot(state, Alpha::Y(param))];
                    path.extend_from_slice(&v.path);
                    if !v.open {
                        return Val { path, open: false };
                    }
                    t = &t.children[0];
                }
            }
        }
    }

    fn check(&self, t: &Term<AnnotatedSymbol>) -> Result<(), MttError> {
        let a = t.label.letter;
        let ok = self.mtt.input.contains(a)
            && self.mtt.input.rank(a) == t.children.len()
            && t.label.rho.len() == self.slots.len()
            && t.label
                .rho
                .iter()
                .zip(&self.choices[a.index()])
                .all(|(&r, l)| (r as usize) < l.len());
        if !ok {
            return Err(MttError::AlphabetMismatch);
        }
        t.children.iter().try_for_each(|c| self.check(c))
    }

    fn values(&self, t: &Term<AnnotatedSymbol>) -> Vec<Val> {
        let kids: Vec<Vec<Val>> = t.children.iter().map(|c| self.values(c)).collect();
        let below: Vec<&[Val]> = kids.iter().map(Vec::as_slice).collect();
        let a = t.label.letter.index();
        (0..self.slots.len())
            .map(|s| self.run(&self.choices[a][s][t.label.rho[s] as usize], &below))
            .collect()
    }

    /// Output of `T̃` on an annotated tree, a unary tree over `Γ̂`.
    pub fn eval(&self, t: &Term<AnnotatedSymbol>) -> Result<Tree, MttError> {
        self.check(t)?;
        let v = &self.values(t)[0];
        Ok(self.ba.chain(&v.path))
    }

    /// Every annotation of `t`, at most `cap` of them.
    pub fn annotate_all(&self, t: &Tree, cap: u64) -> Result<Vec<Term<AnnotatedSymbol>>, MttError> {
        let total = self.annotated_tree_count(t);
        if total > BigUint::from(cap) {
            return Err(MttError::AnnotationExplosion {
                count: total.to_string(),
                cap,
            });
        }
        fn go(h: &Hat<'_>, t: &Tree) -> Vec<Term<AnnotatedSymbol>> {
            let mut acc: Vec<Vec<Term<AnnotatedSymbol>>> = vec![Vec::new()];
            for c in &t.children {
                let subs = go(h, c);
                acc = acc
                    .into_iter()
                    .flat_map(|pre| {
                        subs.iter().map(move |s| {
                            let mut v = pre.clone();
                            v.push(s.clone());
                            v
                        })
                    })
                    .collect();
            }
            h.annotations(t.label)
                .flat_map(|sym| acc.iter().map(move |ch| Term::node(sym.clone(), ch.clone())))
                .collect()
        }
        Ok(go(self, t))
    }

    /// Number of annotated trees projecting to `t`.
    pub fn annotated_tree_count(&self, t: &Tree) -> BigUint {
        t.children.iter().fold(self.annotation_count(t.label), |acc, c| {
            acc * self.annotated_tree_count(c)
        })
    }

    /// The set of outputs of `T̃` over all annotations of `t`.
    ///
    /// Bottom-up over `t`, keeping the distinct tuples of state values at
    /// each node instead of the annotations themselves. `work_cap` bounds
    /// the number of branch evaluations.
    pub fn reachable_outputs(&self, t: &Tree, work_cap: u64) -> Result<BTreeSet<Tree>, MttError> {
        if !self.mtt.input.accepts(t) {
            return Err(MttError::AlphabetMismatch);
        }
        let mut work = 0u64;
        let root = self.tuples(t, true, &mut work, work_cap)?;
        Ok(root.into_iter().map(|v| self.ba.chain(&v[0].path)).collect())
    }

    fn tuples(&self, t: &Tree, at_root: bool, work: &mut u64, cap: u64) -> Result<FxHashSet<Vec<Val>>, MttError> {
        let kids: Vec<Vec<Vec<Val>>> = t
            .children
            .iter()
            .map(|c| Ok(self.tuples(c, false, work, cap)?.into_iter().collect()))
            .collect::<Result<_, MttError>>()?;
        let wanted = if at_root { 1 } else { self.slots.len() };
        let a = t.label.index();
        let mut out = FxHashSet::default();
        let mut pick = vec![0usize; kids.len()];
        if kids.iter().any(Vec::is_empty) {
            return Ok(out);
        }
        loop {
            let below: Vec<&[Val]> = pick.iter().zip(&kids).map(|(&i, k)| k[i].as_slice()).collect();
            let mut per_slot: Vec<Vec<Val>> = Vec::with_capacity(wanted);
            for s in 0..wanted {
                let mut seen: BTreeSet<Val> = BTreeSet::new();
                for b in &self.choices[a][s] {
                    *work += 1;
                    if *work > cap {
                        return Err(MttError::CapExceeded {
                            what: "annotation enumeration",
                            cap,
                        });
                    }
                    seen.insert(self.run(b, &below));
                }
                per_slot.push(seen.into_iter().collect());
            }
            // all combinations of per-slot values
            let mut idx = vec![0usize; wanted];
            loop {
                *work += 1;
                if *work > cap {
                    return Err(MttError::CapExceeded {
                        what: "annotation enumeration",
                        cap,
                    });
                }
                out.insert(idx.iter().zip(&per_slot).map(|(&i, l)| l[i].clone()).collect());
                if !advance(&mut idx, |k| per_slot[k].len()) {
                    break;
                }
            }
            if !advance(&mut pick, |k| kids[k].len()) {
                break;
            }
        }
        Ok(out)
    }

    /// `T̃` as an ordinary transducer over the annotated letters, which
    /// are returned alongside (letter `i` of the new input alphabet is
    /// entry `i`).
    pub fn materialize(&self, cap: u64) -> Result<(Mtt, Vec<AnnotatedSymbol>), MttError> {
        let total: BigUint = self.mtt.input.ids().map(|a| self.annotation_count(a)).sum();
        if total > BigUint::from(cap) {
            return Err(MttError::AnnotationExplosion {
                count: total.to_string(),
                cap,
            });
        }
        let letters: Vec<AnnotatedSymbol> = self.mtt.input.ids().flat_map(|a| self.annotations(a)).collect();
        let names = letters.iter().map(|s| {
            let rho: Vec<String> = s.rho.iter().map(u32::to_string).collect();
            (
                format!("{}_{}", self.mtt.input.name(s.letter), rho.join("_")),
                self.mtt.input.rank(s.letter),
            )
        });
        let input = RankedAlphabet::new(names)?;
        let states: Vec<MttState> = (0..self.slots.len())
            .map(|s| MttState {
                name: self.state_name(s),
                rank: usize::from(matches!(self.slots[s].1, Alpha::Y(_))),
            })
            .collect();
        let rules = (0..self.slots.len())
            .map(|s| {
                letters
                    .iter()
                    .map(|l| self.to_rhs(&self.choices[l.letter.index()][s][l.rho[s] as usize]))
                    .collect()
            })
            .collect();
        let m = Mtt::new(input, self.ba.alphabet().clone(), states, rules)?;
        Ok((m, letters))
    }

    fn to_rhs(&self, b: &RhsBranch) -> Rhs {
        let kids = || b.children.iter().map(|c| self.to_rhs(c)).collect();
        match b.label {
            BranchLabel::Hat(a) => Term::node(RhsLabel::Out(self.ba.hat(a).expect("positive rank")), kids()),
            BranchLabel::End => Term::leaf(RhsLabel::Out(self.ba.end())),
            BranchLabel::Param(_) => Term::leaf(RhsLabel::Param(1)),
            BranchLabel::CallEnd { state, var } => Term::leaf(RhsLabel::Call {
                state: self.slot(state, Alpha::End),
                var,
            }),
            BranchLabel::CallParam { state, param, var } => Term::node(
                RhsLabel::Call {
                    state: self.slot(state, Alpha::Y(param)),
                    var,
                },
                kids(),
            ),
        }
    }
}

/// Odometer step; false once every position wrapped around.
fn advance(idx: &mut [usize], len: impl Fn(usize) -> usize) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < len(k) {
            return true;
        }
        idx[k] = 0;
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LemmaCaps {
    /// Cap on the output of `T`.
    pub output: usize,
    /// Cap on branch evaluations during annotation enumeration.
    pub work: u64,
}

impl Default for LemmaCaps {
    fn default() -> Self {
        LemmaCaps {
            output: 1_000_000,
            work: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub output_height: usize,
    pub output_size: usize,
    /// Largest output of `T̃` over all annotations.
    pub max_branch_size: usize,
    pub distinct_outputs: usize,
    pub annotated_trees: BigUint,
    /// Every output of `T̃` is a branch of the output of `T`.
    pub all_branches: bool,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.all_branches && self.max_branch_size == self.output_height + 1
    }
}

/// Checks on `t` that every annotation of `t` yields a branch of `T(t)`,
/// and that the longest such branch has `height(T(t)) + 1` nodes.
pub fn verify_height_lemma(m: &Mtt, t: &Tree, caps: LemmaCaps) -> Result<LemmaReport, MttError> {
    let out = mtt_eval_with(m, t, caps.output)?;
    let h = hat(m);
    let all = branches(&out, h.branch_alphabet());
    let reached = h.reachable_outputs(t, caps.work)?;
    Ok(LemmaReport {
        output_height: out.height(),
        output_size: out.size(),
        max_branch_size: reached.iter().map(Tree::size).max().unwrap_or(0),
        distinct_outputs: reached.len(),
        annotated_trees: h.annotated_tree_count(t),
        all_branches: reached.is_subset(&all),
    })
}
