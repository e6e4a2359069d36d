//! Text syntax of transducers.
//!
//! ```text
//! mtt     := item*
//! item    := ("input" | "output") "{" (word ":" rank)* "}"
//!          | "state" word ":" rank ";"
//!          | "rule" state "(" letter ["(" x1 "," ... ")"] ")" ["(" y1 "," ... ")"] "=" rhs ";"
//! rhs     := state "[" xi "]" ["(" rhs "," ... ")"]
//!          | yj
//!          | letter ["(" rhs "," ... ")"]
//! ```
//!
//! States must be declared before use; the first declared state is the root.
//! Without an `input` or `output` block the alphabet is collected from the
//! rules in order of first use.

use std::collections::HashMap;

use super::{Mtt, MttError, MttState, Rhs, RhsLabel};
use crate::syntax::{Cursor, ParseError, Pos, Tok};
use crate::tree::{RankedAlphabet, SymbolId, Term};

enum Raw {
    Word(String, Pos, Vec<Raw>),
    Call(usize, usize, Vec<Raw>),
}

struct RawRule {
    state: usize,
    letter: String,
    letter_pos: Pos,
    vars: usize,
    params: usize,
    rhs: Raw,
}

/// Collects `name:rank` pairs, either declared up front or seen in use.
struct Letters {
    declared: bool,
    list: Vec<(String, usize)>,
    index: HashMap<String, usize>,
}

impl Letters {
    fn new() -> Self {
        Letters {
            declared: false,
            list: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn declare(&mut self, name: String, rank: usize, pos: Pos) -> Result<(), ParseError> {
        if self.index.contains_key(&name) {
            return Err(ParseError::syntax(format!("duplicate symbol `{name}`"), pos));
        }
        self.index.insert(name.clone(), self.list.len());
        self.list.push((name, rank));
        Ok(())
    }

    fn use_at(&mut self, name: &str, rank: usize, pos: Pos) -> Result<SymbolId, ParseError> {
        match self.index.get(name) {
            Some(&i) if self.list[i].1 == rank => Ok(SymbolId(i as u32)),
            Some(&i) => Err(ParseError::ArityMismatch {
                name: name.to_string(),
                expected: self.list[i].1,
                found: rank,
                pos,
            }),
            None if self.declared => Err(ParseError::UnknownSymbol {
                name: name.to_string(),
                pos,
            }),
            None => {
                self.declare(name.to_string(), rank, pos)?;
                Ok(SymbolId(self.list.len() as u32 - 1))
            }
        }
    }

    fn alphabet(self) -> Result<RankedAlphabet, MttError> {
        Ok(RankedAlphabet::new(self.list)?)
    }
}

fn indexed(word: &str, prefix: char) -> Option<usize> {
    let rest = word.strip_prefix(prefix)?;
    if rest.starts_with('0') {
        return None;
    }
    rest.parse().ok().filter(|&i| i > 0)
}

/// Parses `( v1, v2, ... )` requiring exactly `prefix1, prefix2, ...`.
fn parse_vars(cur: &mut Cursor, prefix: char) -> Result<usize, ParseError> {
    cur.expect_punct('(')?;
    let mut n = 0;
    loop {
        let (w, pos) = cur.expect_word("a variable")?;
        if indexed(&w, prefix) != Some(n + 1) {
            return Err(ParseError::syntax(
                format!("expected `{prefix}{}`, found `{w}`", n + 1),
                pos,
            ));
        }
        n += 1;
        if !cur.eat_punct(',') {
            break;
        }
    }
    cur.expect_punct(')')?;
    Ok(n)
}

fn parse_args(cur: &mut Cursor, states: &HashMap<String, usize>) -> Result<Vec<Raw>, ParseError> {
    let mut args = Vec::new();
    if cur.eat_punct('(') {
        loop {
            args.push(parse_raw(cur, states)?);
            if !cur.eat_punct(',') {
                break;
            }
        }
        cur.expect_punct(')')?;
    }
    Ok(args)
}

fn parse_raw(cur: &mut Cursor, states: &HashMap<String, usize>) -> Result<Raw, ParseError> {
    let (w, pos) = cur.expect_word("a right-hand side")?;
    if cur.eat_punct('[') {
        let q = *states
            .get(&w)
            .ok_or_else(|| ParseError::syntax(format!("unknown state `{w}`"), pos))?;
        let (x, xpos) = cur.expect_word("an input variable")?;
        let var = indexed(&x, 'x')
            .ok_or_else(|| ParseError::syntax(format!("expected an input variable, found `{x}`"), xpos))?;
        cur.expect_punct(']')?;
        let args = parse_args(cur, states)?;
        return Ok(Raw::Call(q, var, args));
    }
    let args = parse_args(cur, states)?;
    Ok(Raw::Word(w, pos, args))
}

fn parse_block(cur: &mut Cursor, letters: &mut Letters) -> Result<(), ParseError> {
    letters.declared = true;
    cur.expect_punct('{')?;
    while !cur.eat_punct('}') {
        let (name, pos) = cur.expect_word("a symbol")?;
        cur.expect_punct(':')?;
        let rank = cur.expect_number("a rank")?;
        letters.declare(name, rank, pos)?;
    }
    Ok(())
}

pub fn parse_mtt(text: &str) -> Result<Mtt, MttError> {
    let mut cur = Cursor::new(text)?;
    let mut input = Letters::new();
    let mut output = Letters::new();
    let mut states: Vec<MttState> = Vec::new();
    let mut by_name: HashMap<String, usize> = HashMap::new();
    let mut raw_rules = Vec::new();
    while !cur.at_eof() {
        let (kw, pos) = cur.expect_word("`input`, `output`, `state` or `rule`")?;
        match kw.as_str() {
            "input" => parse_block(&mut cur, &mut input)?,
            "output" => parse_block(&mut cur, &mut output)?,
            "state" => {
                let (name, npos) = cur.expect_word("a state name")?;
                cur.expect_punct(':')?;
                let rank = cur.expect_number("a rank")?;
                cur.expect_punct(';')?;
                if by_name.contains_key(&name) {
                    return Err(ParseError::syntax(format!("duplicate state `{name}`"), npos).into());
                }
                by_name.insert(name.clone(), states.len());
                states.push(MttState { name, rank });
            }
            "rule" => {
                let (name, npos) = cur.expect_word("a state name")?;
                let state = *by_name
                    .get(&name)
                    .ok_or_else(|| ParseError::syntax(format!("unknown state `{name}`"), npos))?;
                cur.expect_punct('(')?;
                let (letter, letter_pos) = cur.expect_word("an input letter")?;
                let vars = if cur.peek() == &Tok::Punct('(') {
                    parse_vars(&mut cur, 'x')?
                } else {
                    0
                };
                cur.expect_punct(')')?;
                let params = if cur.peek() == &Tok::Punct('(') {
                    parse_vars(&mut cur, 'y')?
                } else {
                    0
                };
                if params != states[state].rank {
                    return Err(ParseError::syntax(
                        format!(
                            "state `{name}` has {} parameter(s), rule lists {params}",
                            states[state].rank
                        ),
                        npos,
                    )
                    .into());
                }
                cur.expect_punct('=')?;
                let rhs = parse_raw(&mut cur, &by_name)?;
                cur.expect_punct(';')?;
                raw_rules.push(RawRule {
                    state,
                    letter,
                    letter_pos,
                    vars,
                    params,
                    rhs,
                });
            }
            other => {
                return Err(ParseError::syntax(
                    format!("expected `input`, `output`, `state` or `rule`, found `{other}`"),
                    pos,
                )
                .into())
            }
        }
    }

    let mut table: Vec<HashMap<SymbolId, Rhs>> = vec![HashMap::new(); states.len()];
    for r in &raw_rules {
        let a = input.use_at(&r.letter, r.vars, r.letter_pos)?;
        let rhs = resolve(&r.rhs, r.params, &mut output)?;
        if table[r.state].insert(a, rhs).is_some() {
            return Err(ParseError::syntax(
                format!("second rule for `{}` on `{}`", states[r.state].name, r.letter),
                r.letter_pos,
            )
            .into());
        }
    }
    let input = input.alphabet()?;
    let output = output.alphabet()?;
    let mut rules = Vec::with_capacity(states.len());
    for (q, mut row) in table.into_iter().enumerate() {
        let mut out = Vec::with_capacity(input.len());
        for a in input.ids() {
            out.push(row.remove(&a).ok_or_else(|| MttError::MissingRule {
                state: states[q].name.clone(),
                letter: input.name(a).to_string(),
            })?);
        }
        rules.push(out);
    }
    Mtt::new(input, output, states, rules)
}

fn resolve(r: &Raw, params: usize, output: &mut Letters) -> Result<Rhs, ParseError> {
    match r {
        Raw::Call(q, var, args) => {
            let children = args
                .iter()
                .map(|c| resolve(c, params, output))
                .collect::<Result<_, _>>()?;
            Ok(Term::node(RhsLabel::Call { state: *q, var: *var }, children))
        }
        Raw::Word(w, pos, args) => {
            if args.is_empty() {
                if let Some(i) = indexed(w, 'y').filter(|&i| i <= params) {
                    return Ok(Term::leaf(RhsLabel::Param(i)));
                }
            }
            let s = output.use_at(w, args.len(), *pos)?;
            let children = args
                .iter()
                .map(|c| resolve(c, params, output))
                .collect::<Result<_, _>>()?;
            Ok(Term::node(RhsLabel::Out(s), children))
        }
    }
}
