//! Growth analysis for ℕ-weighted tree automata.
//!
//! The crate decides whether the value (or, with unit weights, the number of
//! accepting runs) of a tree automaton grows polynomially or exponentially in
//! the size of the input tree, computes the exact polynomial degree and
//! produces witnesses for both verdicts. Around this core sit a brute-force
//! [`oracle`], the run-counting reduction for marked-tree queries in
//! [`query`], and branch computations for macro tree transducers in [`mtt`].

pub mod automaton;
pub mod corpus;
pub mod graph;
pub mod growth;
pub mod horn;
pub mod mtt;
pub mod oracle;
pub mod query;
pub mod report;
pub mod syntax;
pub mod tree;

pub use automaton::{Automaton, AutomatonError, Run, StateId, Transition, ValueVector};

pub use growth::{analyze, GrowthError, GrowthReport, Verdict};
pub use syntax::{ParseError, Pos};
pub use tree::{
    parse_context, parse_tree, print_context, print_tree, Context, NodeAddress, RankedAlphabet, SymbolId, Term, Tree,
};
