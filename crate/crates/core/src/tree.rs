//! Ranked alphabets, finite ranked trees and one-hole contexts.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Cursor, ParseError, Pos};

/// Handle of a symbol inside its [`RankedAlphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub rank: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("alphabet has no symbol of rank 0")]
    NoNullarySymbol,
    #[error("invalid symbol name `{0}`")]
    InvalidName(String),
}

/// An ordered set of symbols with ranks. Symbol order is significant: it
/// fixes [`SymbolId`]s and the canonical enumeration order of trees.
#[derive(Clone, Debug, Default)]
pub struct RankedAlphabet {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, SymbolId>,
}

impl PartialEq for RankedAlphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for RankedAlphabet {}

impl RankedAlphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut alphabet = RankedAlphabet::default();
        for (name, rank) in symbols {
            let name = name.into();
            if name.is_empty() || !name.chars().all(crate::syntax::is_word_char) {
                return Err(AlphabetError::InvalidName(name));
            }
            if alphabet.by_name.contains_key(&name) {
                return Err(AlphabetError::DuplicateSymbol(name));
            }
            let id = SymbolId(alphabet.symbols.len() as u32);
            alphabet.by_name.insert(name.clone(), id);
            alphabet.symbols.push(Symbol { name, rank });
        }
        if !alphabet.symbols.iter().any(|s| s.rank == 0) {
            return Err(AlphabetError::NoNullarySymbol);
        }
        Ok(alphabet)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn ids(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.symbols.len() as u32).map(SymbolId)
    }

    pub fn rank(&self, id: SymbolId) -> usize {
        self.symbols[id.index()].rank
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.index()].name
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn contains(&self, id: SymbolId) -> bool {
        id.index() < self.symbols.len()
    }

    pub fn max_rank(&self) -> usize {
        self.symbols.iter().map(|s| s.rank).max().unwrap_or(0)
    }

    /// Checks that `t` only uses symbols of this alphabet with matching arity.
    pub fn accepts(&self, t: &Tree) -> bool {
        self.contains(t.label) && self.rank(t.label) == t.children.len() && t.children.iter().all(|c| self.accepts(c))
    }
}

impl fmt::Display for RankedAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for s in &self.symbols {
            write!(f, " {}:{}", s.name, s.rank)?;
        }
        f.write_str(" }")
    }
}

/// Path from the root; child indices are 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeAddress(pub Vec<usize>);

impl NodeAddress {
    pub fn root() -> Self {
        NodeAddress(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut path = self.0.clone();
        path.push(i);
        NodeAddress(path)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for NodeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// A finite ordered tree with labels of type `L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term<L> {
    pub label: L,
    pub children: Vec<Term<L>>,
}

impl<L> Term<L> {
    pub fn leaf(label: L) -> Self {
        Term {
            label,
            children: Vec::new(),
        }
    }

    pub fn node(label: L, children: Vec<Term<L>>) -> Self {
        Term { label, children }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Term::size).sum::<usize>()
    }

    /// Number of edges on a longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    pub fn subterm(&self, address: &NodeAddress) -> Option<&Term<L>> {
        let mut t = self;
        for &i in &address.0 {
            t = t.children.get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    /// All nodes with their addresses, in preorder.
    pub fn nodes(&self) -> Vec<(NodeAddress, &Term<L>)> {
        let mut out = Vec::new();
        let mut stack = vec![(NodeAddress::root(), self)];
        while let Some((addr, t)) = stack.pop() {
            for (i, c) in t.children.iter().enumerate().rev() {
                stack.push((addr.child(i + 1), c));
            }
            out.push((addr, t));
        }
        out
    }

    pub fn map<M>(&self, f: &mut impl FnMut(&L) -> M) -> Term<M> {
        Term {
            label: f(&self.label),
            children: self.children.iter().map(|c| c.map(f)).collect(),
        }
    }

    /// Writes the term in `label(child,...)` syntax using `name` for labels.
    pub(crate) fn write_with(
        &self,
        f: &mut impl fmt::Write,
        name: &impl Fn(&L, &mut dyn fmt::Write) -> fmt::Result,
    ) -> fmt::Result {
        name(&self.label, f)?;
        if !self.children.is_empty() {
            f.write_char('(')?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_char(',')?;
                }
                c.write_with(f, name)?;
            }
            f.write_char(')')?;
        }
        Ok(())
    }
}

pub type Tree = Term<SymbolId>;

impl Tree {
    pub fn display<'a>(&'a self, alphabet: &'a RankedAlphabet) -> TreeDisplay<'a> {
        TreeDisplay { tree: self, alphabet }
    }
}

pub struct TreeDisplay<'a> {
    tree: &'a Tree,
    alphabet: &'a RankedAlphabet,
}

impl fmt::Display for TreeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.tree.write_with(f, &|s: &SymbolId, w: &mut dyn fmt::Write| {
            w.write_str(self.alphabet.name(*s))
        })
    }
}

pub fn print_tree(t: &Tree, alphabet: &RankedAlphabet) -> String {
    t.display(alphabet).to_string()
}

/// Spelling of the hole in the text syntax.
pub const HOLE: &str = "_HOLE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Sym(SymbolId),
    Hole,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("a context must contain exactly one hole, found {0}")]
pub struct HoleCountError(pub usize);

/// A tree with exactly one leaf labelled by the hole.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context(Term<Slot>);

impl Context {
    /// The identity context `□`.
    pub fn hole() -> Self {
        Context(Term::leaf(Slot::Hole))
    }

    pub fn from_term(term: Term<Slot>) -> Result<Self, HoleCountError> {
        fn holes(t: &Term<Slot>) -> usize {
            usize::from(t.label == Slot::Hole && t.children.is_empty()) + t.children.iter().map(holes).sum::<usize>()
        }
        match holes(&term) {
            1 => Ok(Context(term)),
            n => Err(HoleCountError(n)),
        }
    }

    /// `letter(side_1, ..., □, ..., side_m)` with the hole at 1-based `index`.
    pub fn shallow(letter: SymbolId, index: usize, side: Vec<Tree>) -> Self {
        assert!(index >= 1 && index <= side.len() + 1, "hole index out of range");
        let mut children: Vec<Term<Slot>> = side.iter().map(lift).collect();
        children.insert(index - 1, Term::leaf(Slot::Hole));
        Context(Term::node(Slot::Sym(letter), children))
    }

    pub fn term(&self) -> &Term<Slot> {
        &self.0
    }

    /// Node count, the hole included.
    pub fn size(&self) -> usize {
        self.0.size()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    pub fn is_hole(&self) -> bool {
        self.0.label == Slot::Hole
    }

    pub fn hole_address(&self) -> NodeAddress {
        let mut path = Vec::new();
        let mut t = &self.0;
        'down: while t.label != Slot::Hole {
            for (i, c) in t.children.iter().enumerate() {
                if contains_hole(c) {
                    path.push(i + 1);
                    t = c;
                    continue 'down;
                }
            }
            unreachable!("context without hole");
        }
        NodeAddress(path)
    }

    /// `C[t]`: plugs `t` into the hole.
    pub fn apply(&self, t: &Tree) -> Tree {
        fn go(c: &Term<Slot>, t: &Tree) -> Tree {
            match c.label {
                Slot::Hole => t.clone(),
                Slot::Sym(s) => Term::node(s, c.children.iter().map(|x| go(x, t)).collect()),
            }
        }
        go(&self.0, t)
    }

    /// `C ∘ inner`, so that `(C ∘ inner)[t] = C[inner[t]]`.
    pub fn compose(&self, inner: &Context) -> Context {
        fn go(c: &Term<Slot>, inner: &Term<Slot>) -> Term<Slot> {
            match c.label {
                Slot::Hole => inner.clone(),
                Slot::Sym(s) => Term::node(Slot::Sym(s), c.children.iter().map(|x| go(x, inner)).collect()),
            }
        }
        Context(go(&self.0, &inner.0))
    }

    /// `C^n`, with `C^0 = □`.
    pub fn power(&self, n: usize) -> Context {
        let mut acc = Context::hole();
        for _ in 0..n {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn display<'a>(&'a self, alphabet: &'a RankedAlphabet) -> ContextDisplay<'a> {
        ContextDisplay {
            context: self,
            alphabet,
        }
    }
}

fn contains_hole(t: &Term<Slot>) -> bool {
    t.label == Slot::Hole || t.children.iter().any(contains_hole)
}

/// Embeds a tree as a hole-free term over `Σ ∪ {□}`.
pub fn lift(t: &Tree) -> Term<Slot> {
    t.map(&mut |s| Slot::Sym(*s))
}

pub struct ContextDisplay<'a> {
    context: &'a Context,
    alphabet: &'a RankedAlphabet,
}

impl fmt::Display for ContextDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.context
            .0
            .write_with(f, &|s: &Slot, w: &mut dyn fmt::Write| match s {
                Slot::Hole => w.write_str(HOLE),
                Slot::Sym(s) => w.write_str(self.alphabet.name(*s)),
            })
    }
}

pub fn print_context(c: &Context, alphabet: &RankedAlphabet) -> String {
    c.display(alphabet).to_string()
}

/// Parses `tree := ident | ident '(' tree (',' tree)* ')'`.
pub fn parse_tree(text: &str, alphabet: &RankedAlphabet) -> Result<Tree, ParseError> {
    let mut cur = Cursor::new(text)?;
    let t = parse_term(&mut cur, &mut |name, pos| {
        alphabet
            .lookup(name)
            .map(|id| (id, alphabet.rank(id)))
            .ok_or_else(|| ParseError::UnknownSymbol {
                name: name.to_string(),
                pos,
            })
    })?;
    cur.expect_eof()?;
    Ok(t)
}

/// Parses a context; the hole is spelled `_HOLE`.
pub fn parse_context(text: &str, alphabet: &RankedAlphabet) -> Result<Context, ParseError> {
    let mut cur = Cursor::new(text)?;
    let start = cur.pos();
    let t = parse_term(&mut cur, &mut |name, pos| {
        if name == HOLE {
            return Ok((Slot::Hole, 0));
        }
        alphabet
            .lookup(name)
            .map(|id| (Slot::Sym(id), alphabet.rank(id)))
            .ok_or_else(|| ParseError::UnknownSymbol {
                name: name.to_string(),
                pos,
            })
    })?;
    cur.expect_eof()?;
    Context::from_term(t).map_err(|e| ParseError::syntax(e.to_string(), start))
}

/// Generic term parser; `resolve` maps a word to a label and its rank.
pub(crate) fn parse_term<L>(
    cur: &mut Cursor,
    resolve: &mut impl FnMut(&str, Pos) -> Result<(L, usize), ParseError>,
) -> Result<Term<L>, ParseError> {
    let (name, pos) = cur.expect_word("a symbol")?;
    let (label, rank) = resolve(&name, pos)?;
    let mut children = Vec::new();
    if cur.eat_punct('(') {
        loop {
            children.push(parse_term(cur, resolve)?);
            if cur.eat_punct(',') {
                continue;
            }
            cur.expect_punct(')')?;
            break;
        }
    }
    if children.len() != rank {
        return Err(ParseError::ArityMismatch {
            name,
            expected: rank,
            found: children.len(),
            pos,
        });
    }
    Ok(Term::node(label, children))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> RankedAlphabet {
        RankedAlphabet::new([("a", 2), ("b", 1), ("c", 0)]).unwrap()
    }

    #[test]
    fn alphabet_invariants() {
        assert_eq!(
            RankedAlphabet::new([("a", 2), ("a", 0)]),
            Err(AlphabetError::DuplicateSymbol("a".into()))
        );
        assert_eq!(
            RankedAlphabet::new([("a", 2), ("b", 1)]),
            Err(AlphabetError::NoNullarySymbol)
        );
    }

    #[test]
    fn parses_leaf_and_nested() {
        let al = abc();
        let c = parse_tree("c", &al).unwrap();
        assert_eq!(c, Term::leaf(SymbolId(2)));
        let t = parse_tree("a(b(c), c)", &al).unwrap();
        assert_eq!(print_tree(&t, &al), "a(b(c),c)");
        assert_eq!(t.children.len(), 2);
        assert_eq!(t.children[0], parse_tree("b(c)", &al).unwrap());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let al = abc();
        assert!(matches!(
            parse_tree("a(c,d)", &al),
            Err(ParseError::UnknownSymbol { ref name, pos: Pos { line: 1, col: 5 } }) if name == "d"
        ));
        assert!(matches!(
            parse_tree("b(c,c)", &al),
            Err(ParseError::ArityMismatch {
                expected: 1,
                found: 2,
                ..
            })
        ));
        assert!(matches!(parse_tree("a(c,", &al), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_tree("c c", &al), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn size_and_height() {
        let al = abc();
        let c = parse_tree("c", &al).unwrap();
        assert_eq!((c.size(), c.height()), (1, 0));
        let t = parse_tree("a(b(b(c)),a(b(c),c))", &al).unwrap();
        assert_eq!((t.size(), t.height()), (8, 3));
        let nat = RankedAlphabet::new([("S", 1), ("0", 0)]).unwrap();
        let s = parse_tree("S(S(0))", &nat).unwrap();
        assert_eq!((s.size(), s.height()), (3, 2));
    }

    #[test]
    fn context_application_matches_plugging_example() {
        let al = abc();
        let ctx = parse_context("a(b(_HOLE),c)", &al).unwrap();
        let t = parse_tree("a(c,c)", &al).unwrap();
        assert_eq!(print_tree(&ctx.apply(&t), &al), "a(b(a(c,c)),c)");
        assert_eq!(ctx.hole_address(), NodeAddress(vec![1, 1]));
    }

    #[test]
    fn powers_of_contexts() {
        let al = abc();
        let b = parse_context("b(_HOLE)", &al).unwrap();
        let c = parse_tree("c", &al).unwrap();
        assert_eq!(b.power(0), Context::hole());
        assert_eq!(print_tree(&b.power(0).apply(&c), &al), "c");
        assert_eq!(print_tree(&b.power(3).apply(&c), &al), "b(b(b(c)))");
        assert_eq!(print_context(&b.power(2), &al), "b(b(_HOLE))");
    }

    #[test]
    fn contexts_need_exactly_one_hole() {
        let al = abc();
        assert!(parse_context("a(_HOLE,_HOLE)", &al).is_err());
        assert!(parse_context("a(c,c)", &al).is_err());
        assert!(parse_context("_HOLE", &al).unwrap().is_hole());
    }

    #[test]
    fn shallow_context_places_hole() {
        let al = abc();
        let c = parse_tree("c", &al).unwrap();
        let ctx = Context::shallow(SymbolId(0), 2, vec![c.clone()]);
        assert_eq!(print_context(&ctx, &al), "a(c,_HOLE)");
    }

    #[test]
    fn node_addresses_are_one_based_preorder() {
        let al = abc();
        let t = parse_tree("a(b(c),c)", &al).unwrap();
        let addrs: Vec<String> = t.nodes().iter().map(|(a, _)| a.to_string()).collect();
        assert_eq!(addrs, vec!["ε", "1", "1.1", "2"]);
        assert_eq!(t.subterm(&NodeAddress(vec![1, 1])), Some(&Term::leaf(SymbolId(2))));
        assert_eq!(t.subterm(&NodeAddress(vec![3])), None);
    }
}
