//! Deterministic macro tree transducers, branch sets and the annotated
//! transducer whose outputs are branches of maximum length.
//!
//! Variables are 1-based as in the text syntax: `x1` is the first child of
//! the input node, `y1` the first parameter of the state.

mod branch;
mod eval;
mod format;
mod hat;
mod random;
#[cfg(test)]
mod tests;

use std::fmt;

use thiserror::Error;

use crate::syntax::ParseError;
use crate::tree::{AlphabetError, RankedAlphabet, SymbolId, Term};

pub use branch::{branches, rhs_branches, BranchAlphabet, BranchKind, BranchLabel, RhsBranch};
pub use eval::{mtt_eval, mtt_eval_with, state_value, ValueLabel, DEFAULT_OUTPUT_CAP};
pub use format::parse_mtt;
pub use hat::{hat, verify_height_lemma, Alpha, AnnotatedSymbol, Hat, LemmaCaps, LemmaReport};
pub use random::{random_input, random_mtt, RandomMttParams};

/// Label of a right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RhsLabel {
    /// An output letter.
    Out(SymbolId),
    /// `q⟨x_var⟩`, applied to `rank(q)` arguments.
    Call { state: usize, var: usize },
    /// The parameter `y_i`.
    Param(usize),
}

pub type Rhs = Term<RhsLabel>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MttState {
    pub name: String,
    pub rank: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MttError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("transducer has no states")]
    NoStates,
    #[error("root state `{0}` must have rank 0")]
    RootRank(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("no rule for state `{state}` on `{letter}`")]
    MissingRule { state: String, letter: String },
    #[error("rule for `{state}` on `{letter}`: {message}")]
    InvalidRhs {
        state: String,
        letter: String,
        message: String,
    },
    #[error("input tree does not match the input alphabet")]
    AlphabetMismatch,
    #[error("output has {size} nodes, over the cap of {cap}")]
    OutputSizeCap { size: u64, cap: usize },
    #[error("{what} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, cap: u64 },
    #[error("{count} annotated letters requested, over the cap of {cap}")]
    AnnotationExplosion { count: String, cap: u64 },
}

/// A deterministic macro tree transducer. State 0 is the root state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mtt {
    input: RankedAlphabet,
    output: RankedAlphabet,
    states: Vec<MttState>,
    /// `rules[q][a]`
    rules: Vec<Vec<Rhs>>,
}

impl Mtt {
    /// Checks totality and the arity constraints of every right-hand side.
    pub fn new(
        input: RankedAlphabet,
        output: RankedAlphabet,
        states: Vec<MttState>,
        rules: Vec<Vec<Rhs>>,
    ) -> Result<Mtt, MttError> {
        let root = states.first().ok_or(MttError::NoStates)?;
        if root.rank != 0 {
            return Err(MttError::RootRank(root.name.clone()));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].iter().any(|o| o.name == s.name) {
                return Err(MttError::DuplicateState(s.name.clone()));
            }
        }
        let m = Mtt {
            input,
            output,
            states,
            rules,
        };
        if m.rules.len() != m.states.len() {
            return Err(MttError::MissingRule {
                state: m.states[m.rules.len().min(m.states.len() - 1)].name.clone(),
                letter: m.input.name(SymbolId(0)).to_string(),
            });
        }
        for q in 0..m.states.len() {
            if m.rules[q].len() != m.input.len() {
                let a = SymbolId(m.rules[q].len().min(m.input.len() - 1) as u32);
                return Err(MttError::MissingRule {
                    state: m.states[q].name.clone(),
                    letter: m.input.name(a).to_string(),
                });
            }
            for a in m.input.ids() {
                m.check_rhs(q, a, &m.rules[q][a.index()])?;
            }
        }
        Ok(m)
    }

    fn check_rhs(&self, q: usize, a: SymbolId, r: &Rhs) -> Result<(), MttError> {
        let bad = |message: String| MttError::InvalidRhs {
            state: self.states[q].name.clone(),
            letter: self.input.name(a).to_string(),
            message,
        };
        let arity = match r.label {
            RhsLabel::Out(s) => {
                if !self.output.contains(s) {
                    return Err(bad(format!("unknown output symbol {}", s.0)));
                }
                self.output.rank(s)
            }
            RhsLabel::Call { state, var } => {
                if state >= self.states.len() {
                    return Err(bad(format!("unknown state {state}")));
                }
                if var == 0 || var > self.input.rank(a) {
                    return Err(bad(format!("x{var} out of range")));
                }
                self.states[state].rank
            }
            RhsLabel::Param(i) => {
                if i == 0 || i > self.states[q].rank {
                    return Err(bad(format!("y{i} out of range")));
                }
                0
            }
        };
        if r.children.len() != arity {
            return Err(bad(format!(
                "{} has arity {arity} but {} argument(s)",
                self.label_name(r.label),
                r.children.len()
            )));
        }
        r.children.iter().try_for_each(|c| self.check_rhs(q, a, c))
    }

    pub fn input(&self) -> &RankedAlphabet {
        &self.input
    }

    pub fn output(&self) -> &RankedAlphabet {
        &self.output
    }

    pub fn states(&self) -> &[MttState] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s.name == name)
    }

    pub fn rhs(&self, q: usize, a: SymbolId) -> &Rhs {
        &self.rules[q][a.index()]
    }

    fn label_name(&self, l: RhsLabel) -> String {
        match l {
            RhsLabel::Out(s) => self.output.name(s).to_string(),
            RhsLabel::Call { state, var } => format!("{}[x{var}]", self.states[state].name),
            RhsLabel::Param(i) => format!("y{i}"),
        }
    }

    /// Renders a right-hand side in the text syntax.
    pub fn display_rhs(&self, r: &Rhs) -> String {
        let mut s = String::new();
        r.write_with(&mut s, &|l, f| f.write_str(&self.label_name(*l)))
            .expect("writing to a string");
        s
    }
}

impl fmt::Display for Mtt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input {}", self.input)?;
        writeln!(f, "output {}", self.output)?;
        for s in &self.states {
            writeln!(f, "state {}:{};", s.name, s.rank)?;
        }
        for (q, s) in self.states.iter().enumerate() {
            for a in self.input.ids() {
                let k = self.input.rank(a);
                write!(f, "rule {}({}", s.name, self.input.name(a))?;
                if k > 0 {
                    let xs: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
                    write!(f, "({})", xs.join(","))?;
                }
                f.write_str(")")?;
                if s.rank > 0 {
                    let ys: Vec<String> = (1..=s.rank).map(|i| format!("y{i}")).collect();
                    write!(f, "({})", ys.join(","))?;
                }
                writeln!(f, " = {};", self.display_rhs(self.rhs(q, a)))?;
            }
        }
        Ok(())
    }
}

/// The running example: on `S^n(0)` it outputs a tree of height about
/// `2^n`, from input `{ S:1 0:0 }` to output `{ a:2 b:1 c:0 }`.
pub const EXAMPLE: &str = "\
input { S:1 0:0 }
output { a:2 b:1 c:0 }
state q0:0;
state q1:1;
rule q0(0) = b(c);
rule q0(S(x1)) = q1[x1](c);
rule q1(0)(y1) = a(y1,b(y1));
rule q1(S(x1))(y1) = q1[x1](q1[x1](y1));
";

pub fn example() -> Mtt {
    parse_mtt(EXAMPLE).expect("example parses")
}
