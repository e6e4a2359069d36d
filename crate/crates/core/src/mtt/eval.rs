//! Evaluation with shared output.
//!
//! `q⟨t⟩` is computed once per state and input node, bottom-up, as a DAG
//! over output letters and parameters. Substituting arguments for
//! parameters copies only the nodes above a parameter, so outputs of doubly
//! exponential size stay representable; they are expanded only when the
//! size is under the cap.

use std::collections::HashMap;
use std::rc::Rc;

use super::{Mtt, MttError, Rhs, RhsLabel};
use crate::tree::{SymbolId, Term, Tree};

pub const DEFAULT_OUTPUT_CAP: usize = 1_000_000;

/// Label of `q⟨t⟩(y1, ..., yk)`: an output letter or a parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueLabel {
    Out(SymbolId),
    Param(usize),
}

struct Node {
    label: ValueLabel,
    children: Vec<Rc<Node>>,
    /// Contains no parameter.
    closed: bool,
}

impl Drop for Node {
    // deep outputs would otherwise be dropped recursively
    fn drop(&mut self) {
        let mut stack = std::mem::take(&mut self.children);
        while let Some(c) = stack.pop() {
            if let Ok(mut n) = Rc::try_unwrap(c) {
                stack.append(&mut n.children);
            }
        }
    }
}

fn mk(label: ValueLabel, children: Vec<Rc<Node>>) -> Rc<Node> {
    let closed = !matches!(label, ValueLabel::Param(_)) && children.iter().all(|c| c.closed);
    Rc::new(Node {
        label,
        children,
        closed,
    })
}

struct Dag<'m> {
    m: &'m Mtt,
    created: usize,
    limit: usize,
}

impl Dag<'_> {
    fn node(&mut self, label: ValueLabel, children: Vec<Rc<Node>>) -> Result<Rc<Node>, MttError> {
        self.created += 1;
        if self.created > self.limit {
            return Err(MttError::CapExceeded {
                what: "shared output representation",
                cap: self.limit as u64,
            });
        }
        Ok(mk(label, children))
    }

    fn instantiate(&mut self, r: &Rhs, below: &[&[Rc<Node>]]) -> Result<Rc<Node>, MttError> {
        match r.label {
            RhsLabel::Param(i) => self.node(ValueLabel::Param(i), Vec::new()),
            RhsLabel::Out(s) => {
                let ch = r
                    .children
                    .iter()
                    .map(|c| self.instantiate(c, below))
                    .collect::<Result<Vec<_>, _>>()?;
                self.node(ValueLabel::Out(s), ch)
            }
            RhsLabel::Call { state, var } => {
                let body = below[var - 1][state].clone();
                let args = r
                    .children
                    .iter()
                    .map(|c| self.instantiate(c, below))
                    .collect::<Result<Vec<_>, _>>()?;
                let identity = args
                    .iter()
                    .enumerate()
                    .all(|(j, a)| a.label == ValueLabel::Param(j + 1));
                if args.is_empty() || identity {
                    return Ok(body);
                }
                self.subst(&body, &args)
            }
        }
    }

    fn subst(&mut self, root: &Rc<Node>, args: &[Rc<Node>]) -> Result<Rc<Node>, MttError> {
        let mut memo: HashMap<*const Node, Rc<Node>> = HashMap::new();
        let mut stack = vec![(root.clone(), false)];
        while let Some((n, ready)) = stack.pop() {
            if n.closed || memo.contains_key(&Rc::as_ptr(&n)) {
                continue;
            }
            if let ValueLabel::Param(j) = n.label {
                memo.insert(Rc::as_ptr(&n), args[j - 1].clone());
                continue;
            }
            if !ready {
                stack.push((n.clone(), true));
                stack.extend(n.children.iter().map(|c| (c.clone(), false)));
                continue;
            }
            let ch = n
                .children
                .iter()
                .map(|c| {
                    if c.closed {
                        c.clone()
                    } else {
                        memo[&Rc::as_ptr(c)].clone()
                    }
                })
                .collect();
            let out = self.node(n.label, ch)?;
            memo.insert(Rc::as_ptr(&n), out);
        }
        Ok(if root.closed {
            root.clone()
        } else {
            memo[&Rc::as_ptr(root)].clone()
        })
    }
}

/// `q⟨t⟩` for every state `q` and every node of `t`, returned at the root.
fn eval_all(m: &Mtt, t: &Tree, cap: usize) -> Result<Vec<Rc<Node>>, MttError> {
    if !m.input.accepts(t) {
        return Err(MttError::AlphabetMismatch);
    }
    let mut dag = Dag {
        m,
        created: 0,
        limit: cap.saturating_mul(16).max(1 << 16),
    };
    // postorder with an explicit stack
    let mut stack: Vec<(&Tree, bool)> = vec![(t, false)];
    let mut done: Vec<Vec<Rc<Node>>> = Vec::new();
    while let Some((node, expanded)) = stack.pop() {
        if !expanded {
            stack.push((node, true));
            for c in node.children.iter().rev() {
                stack.push((c, false));
            }
            continue;
        }
        let k = node.children.len();
        let kids = done.split_off(done.len() - k);
        let below: Vec<&[Rc<Node>]> = kids.iter().map(Vec::as_slice).collect();
        let mut here = Vec::with_capacity(dag.m.states.len());
        for q in 0..dag.m.states.len() {
            here.push(dag.instantiate(dag.m.rhs(q, node.label), &below)?);
        }
        done.push(here);
    }
    Ok(done.pop().expect("root evaluated"))
}

fn expanded_size(root: &Rc<Node>) -> u64 {
    let mut memo: HashMap<*const Node, u64> = HashMap::new();
    let mut stack = vec![(root.clone(), false)];
    while let Some((n, ready)) = stack.pop() {
        if memo.contains_key(&Rc::as_ptr(&n)) {
            continue;
        }
        if !ready {
            stack.push((n.clone(), true));
            stack.extend(n.children.iter().map(|c| (c.clone(), false)));
            continue;
        }
        let s = n
            .children
            .iter()
            .fold(1u64, |acc, c| acc.saturating_add(memo[&Rc::as_ptr(c)]));
        memo.insert(Rc::as_ptr(&n), s);
    }
    memo[&Rc::as_ptr(root)]
}

fn expand(root: &Node) -> Term<ValueLabel> {
    let mut stack: Vec<(&Node, bool)> = vec![(root, false)];
    let mut done: Vec<Term<ValueLabel>> = Vec::new();
    while let Some((n, ready)) = stack.pop() {
        if !ready {
            stack.push((n, true));
            stack.extend(n.children.iter().rev().map(|c| (&**c, false)));
            continue;
        }
        let ch = done.split_off(done.len() - n.children.len());
        done.push(Term::node(n.label, ch));
    }
    done.pop().expect("root expanded")
}

fn checked(n: &Rc<Node>, cap: usize) -> Result<Term<ValueLabel>, MttError> {
    let size = expanded_size(n);
    if size > cap as u64 {
        return Err(MttError::OutputSizeCap { size, cap });
    }
    Ok(expand(n))
}

/// `q⟨t⟩` as a tree over output letters and the parameters of `q`.
pub fn state_value(m: &Mtt, q: usize, t: &Tree, cap: usize) -> Result<Term<ValueLabel>, MttError> {
    let all = eval_all(m, t, cap)?;
    checked(&all[q], cap)
}

/// `q0⟨t⟩` with the default output cap.
pub fn mtt_eval(m: &Mtt, t: &Tree) -> Result<Tree, MttError> {
    mtt_eval_with(m, t, DEFAULT_OUTPUT_CAP)
}

pub fn mtt_eval_with(m: &Mtt, t: &Tree, cap: usize) -> Result<Tree, MttError> {
    let v = state_value(m, 0, t, cap)?;
    Ok(v.map(&mut |l| match l {
        ValueLabel::Out(s) => *s,
        ValueLabel::Param(_) => unreachable!("the root state has rank 0"),
    }))
}
