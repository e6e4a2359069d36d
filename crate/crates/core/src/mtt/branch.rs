//! Branches of output trees and of right-hand sides.

use std::collections::BTreeSet;

use super::{Rhs, RhsLabel};
use crate::tree::{RankedAlphabet, SymbolId, Term, Tree};

pub const END: &str = "END";

/// `Γ̂`: a unary `hat_a` for every letter `a` of positive rank, and `END`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchAlphabet {
    alphabet: RankedAlphabet,
    hat: Vec<Option<SymbolId>>,
    end: SymbolId,
}

impl BranchAlphabet {
    pub fn new(gamma: &RankedAlphabet) -> Self {
        let mut names: Vec<(String, usize)> = Vec::new();
        let mut hat = Vec::with_capacity(gamma.len());
        for a in gamma.ids() {
            if gamma.rank(a) > 0 {
                hat.push(Some(SymbolId(names.len() as u32)));
                names.push((format!("hat_{}", gamma.name(a)), 1));
            } else {
                hat.push(None);
            }
        }
        let end = SymbolId(names.len() as u32);
        names.push((END.to_string(), 0));
        let alphabet = RankedAlphabet::new(names).expect("hat names are fresh words");
        BranchAlphabet { alphabet, hat, end }
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    /// `â`, for `a` of positive rank.
    pub fn hat(&self, a: SymbolId) -> Option<SymbolId> {
        self.hat.get(a.index()).copied().flatten()
    }

    pub fn end(&self) -> SymbolId {
        self.end
    }

    /// The unary tree `â1(â2(...(END)))`.
    pub fn chain(&self, hats: &[SymbolId]) -> Tree {
        hats.iter()
            .rev()
            .fold(Term::leaf(self.end), |t, &h| Term::node(h, vec![t]))
    }
}

/// The branches of `t`: one per node, reading the hatted labels of its
/// strict ancestors and ending in `END`.
pub fn branches(t: &Tree, ba: &BranchAlphabet) -> BTreeSet<Tree> {
    let mut out = BTreeSet::new();
    let mut path: Vec<SymbolId> = Vec::new();
    // (node, next child to visit)
    let mut stack: Vec<(&Tree, usize)> = vec![(t, 0)];
    out.insert(ba.chain(&path));
    while let Some((node, next)) = stack.pop() {
        if next < node.children.len() {
            stack.push((node, next + 1));
            if next == 0 {
                path.push(ba.hat(node.label).expect("inner nodes have positive rank"));
            }
            out.insert(ba.chain(&path));
            stack.push((&node.children[next], 0));
        } else if !node.children.is_empty() {
            path.pop();
        }
    }
    out
}

/// Labels of branches of right-hand sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchLabel {
    /// `â` for an output letter `a`.
    Hat(SymbolId),
    /// `✠`.
    End,
    /// The parameter `y_i`.
    Param(usize),
    /// `q^✠⟨x_var⟩`, a leaf.
    CallEnd { state: usize, var: usize },
    /// `q^{y_param}⟨x_var⟩`, unary.
    CallParam { state: usize, param: usize, var: usize },
}

pub type RhsBranch = Term<BranchLabel>;

/// Whether a branch ends in a parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchKind {
    End,
    Param(usize),
}

impl BranchKind {
    pub fn of(b: &RhsBranch) -> BranchKind {
        let mut t = b;
        while let Some(c) = t.children.first() {
            t = c;
        }
        match t.label {
            BranchLabel::Param(i) => BranchKind::Param(i),
            _ => BranchKind::End,
        }
    }
}

/// The branches of a right-hand side, without repetition, shortest first.
pub fn rhs_branches(r: &Rhs) -> Vec<RhsBranch> {
    let mut set = BTreeSet::new();
    collect(r, &mut set);
    let mut v: Vec<RhsBranch> = set.into_iter().collect();
    v.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    v
}

fn collect(r: &Rhs, out: &mut BTreeSet<RhsBranch>) {
    out.insert(Term::leaf(BranchLabel::End));
    match r.label {
        RhsLabel::Param(i) => {
            out.insert(Term::leaf(BranchLabel::Param(i)));
        }
        RhsLabel::Out(a) => {
            for c in &r.children {
                let mut below = BTreeSet::new();
                collect(c, &mut below);
                out.extend(below.into_iter().map(|b| Term::node(BranchLabel::Hat(a), vec![b])));
            }
        }
        RhsLabel::Call { state, var } => {
            out.insert(Term::leaf(BranchLabel::CallEnd { state, var }));
            for (j, c) in r.children.iter().enumerate() {
                let mut below = BTreeSet::new();
                collect(c, &mut below);
                let l = BranchLabel::CallParam {
                    state,
                    param: j + 1,
                    var,
                };
                out.extend(below.into_iter().map(|b| Term::node(l, vec![b])));
            }
        }
    }
}
