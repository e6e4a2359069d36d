//! Text format:
//!
//! ```text
//! alphabet { a:2 b:1 c:0 }
//! states { q0 q1 }
//! accept { q0:1 }
//! trans { (q1,q1) -a-> q0 : 1  () -c-> q1 }
//! ```
//!
//! Weights default to 1. `#` starts a comment.

use std::fmt;

use super::{Automaton, AutomatonError, StateId};
use crate::syntax::{Cursor, ParseError, Tok};
use crate::tree::RankedAlphabet;

pub fn parse_automaton(text: &str) -> Result<Automaton, ParseError> {
    let mut cur = Cursor::new(text)?;

    cur.expect_keyword("alphabet")?;
    let open = cur.expect_punct('{')?;
    let mut symbols = Vec::new();
    while !cur.eat_punct('}') {
        let (name, _) = cur.expect_word("a symbol")?;
        cur.expect_punct(':')?;
        let rank: usize = cur.expect_number("a rank")?;
        symbols.push((name, rank));
    }
    let alphabet = RankedAlphabet::new(symbols).map_err(|e| ParseError::syntax(e.to_string(), open))?;
    let mut aut = Automaton::new(alphabet);

    cur.expect_keyword("states")?;
    cur.expect_punct('{')?;
    while !cur.eat_punct('}') {
        let (name, pos) = cur.expect_word("a state")?;
        aut.add_state(name)
            .map_err(|e| ParseError::syntax(e.to_string(), pos))?;
    }

    cur.expect_keyword("accept")?;
    cur.expect_punct('{')?;
    while !cur.eat_punct('}') {
        let q = state(&mut cur, &aut)?;
        let pos = cur.pos();
        let w = weight(&mut cur)?;
        aut.set_accepting(q, w)
            .map_err(|e| ParseError::syntax(e.to_string(), pos))?;
    }

    cur.expect_keyword("trans")?;
    cur.expect_punct('{')?;
    while !cur.eat_punct('}') {
        let start = cur.pos();
        cur.expect_punct('(')?;
        let mut children = Vec::new();
        if !cur.eat_punct(')') {
            loop {
                children.push(state(&mut cur, &aut)?);
                if cur.eat_punct(',') {
                    continue;
                }
                cur.expect_punct(')')?;
                break;
            }
        }
        cur.expect_punct('-')?;
        let (name, lpos) = cur.expect_word("a letter")?;
        let letter = aut.alphabet().lookup(&name).ok_or_else(|| ParseError::UnknownSymbol {
            name: name.clone(),
            pos: lpos,
        })?;
        match cur.bump() {
            (Tok::Arrow, _) => {}
            (other, pos) => return Err(ParseError::syntax(format!("expected `->`, found {other}"), pos)),
        }
        let target = state(&mut cur, &aut)?;
        let w = weight(&mut cur)?;
        aut.add_transition(children, letter, target, w).map_err(|e| match e {
            AutomatonError::RankMismatch {
                letter,
                expected,
                found,
            } => ParseError::ArityMismatch {
                name: letter,
                expected,
                found,
                pos: lpos,
            },
            other => ParseError::syntax(other.to_string(), start),
        })?;
    }
    cur.expect_eof()?;
    Ok(aut)
}

fn state(cur: &mut Cursor, aut: &Automaton) -> Result<StateId, ParseError> {
    let (name, pos) = cur.expect_word("a state")?;
    aut.state_id(&name)
        .ok_or_else(|| ParseError::syntax(format!("unknown state `{name}`"), pos))
}

fn weight(cur: &mut Cursor) -> Result<u64, ParseError> {
    if cur.eat_punct(':') {
        cur.expect_number("a positive weight")
    } else {
        Ok(1)
    }
}

pub(super) fn write_automaton(a: &Automaton, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    writeln!(f, "alphabet {}", a.alphabet())?;
    f.write_str("states {")?;
    for q in a.states() {
        write!(f, " {}", a.state_name(q))?;
    }
    f.write_str(" }\naccept {")?;
    for (&q, &w) in a.accepting() {
        write!(f, " {}:{}", a.state_name(q), w)?;
    }
    f.write_str(" }\ntrans {\n")?;
    for t in a.transitions() {
        f.write_str("  (")?;
        for (i, q) in t.children.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(a.state_name(*q))?;
        }
        writeln!(
            f,
            ") -{}-> {} : {}",
            a.alphabet().name(t.letter),
            a.state_name(t.target),
            t.weight
        )?;
    }
    f.write_str("}\n")
}
