//! Tokenizer shared by the term, automaton and transducer text formats.
//!
//! Words are maximal runs of `[A-Za-z0-9_'@]`; whether a word is a symbol,
//! a state, a weight or a variable is decided by the individual parsers.

use std::fmt;

use thiserror::Error;

/// 1-based line and column of a token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: unknown symbol `{name}`")]
    UnknownSymbol { name: String, pos: Pos },
    #[error("{pos}: `{name}` has rank {expected} but is applied to {found} argument(s)")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
        pos: Pos,
    },
    #[error("{pos}: {message}")]
    Syntax { message: String, pos: Pos },
}

impl ParseError {
    pub(crate) fn syntax(message: impl Into<String>, pos: Pos) -> Self {
        ParseError::Syntax {
            message: message.into(),
            pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Word(String),
    Punct(char),
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '@'
}

pub(crate) struct Cursor {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Cursor {
    pub(crate) fn new(src: &str) -> Result<Self, ParseError> {
        let mut toks = Vec::new();
        let mut line = 1;
        let mut col = 1;
        let mut chars = src.chars().peekable();
        while let Some(&c) = chars.peek() {
            let pos = Pos { line, col };
            if c == '\n' {
                chars.next();
                line += 1;
                col = 1;
            } else if c.is_whitespace() {
                chars.next();
                col += 1;
            } else if c == '#' {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            } else if is_word_char(c) {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    word.push(c);
                    chars.next();
                    col += 1;
                }
                toks.push((Tok::Word(word), pos));
            } else if c == '-' {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    toks.push((Tok::Arrow, pos));
                } else {
                    toks.push((Tok::Punct('-'), pos));
                }
            } else if "(){}[],:;=".contains(c) {
                chars.next();
                col += 1;
                toks.push((Tok::Punct(c), pos));
            } else {
                return Err(ParseError::syntax(format!("unexpected character `{c}`"), pos));
            }
        }
        toks.push((Tok::Eof, Pos { line, col }));
        Ok(Cursor { toks, at: 0 })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    pub(crate) fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub(crate) fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub(crate) fn eat_punct(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Punct(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_punct(&mut self, c: char) -> Result<Pos, ParseError> {
        let pos = self.pos();
        if self.eat_punct(c) {
            Ok(pos)
        } else {
            Err(ParseError::syntax(
                format!("expected `{c}`, found {}", self.peek()),
                pos,
            ))
        }
    }

    pub(crate) fn expect_word(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        match self.bump() {
            (Tok::Word(w), pos) => Ok((w, pos)),
            (other, pos) => Err(ParseError::syntax(format!("expected {what}, found {other}"), pos)),
        }
    }

    pub(crate) fn expect_keyword(&mut self, kw: &str) -> Result<Pos, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Tok::Word(w) if w == kw => {
                self.bump();
                Ok(pos)
            }
            other => Err(ParseError::syntax(format!("expected `{kw}`, found {other}"), pos)),
        }
    }

    pub(crate) fn expect_eof(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(ParseError::syntax(
                format!("unexpected trailing {}", self.peek()),
                self.pos(),
            ))
        }
    }

    pub(crate) fn expect_number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let (w, pos) = self.expect_word(what)?;
        w.parse()
            .map_err(|_| ParseError::syntax(format!("expected {what}, found `{w}`"), pos))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_arrows_and_comments() {
        let mut c = Cursor::new("(q1,q') -a-> q0 : 2 # trailing\n").unwrap();
        let mut kinds = Vec::new();
        while !c.at_eof() {
            kinds.push(c.bump().0);
        }
        assert_eq!(
            kinds,
            vec![
                Tok::Punct('('),
                Tok::Word("q1".into()),
                Tok::Punct(','),
                Tok::Word("q'".into()),
                Tok::Punct(')'),
                Tok::Punct('-'),
                Tok::Word("a".into()),
                Tok::Arrow,
                Tok::Word("q0".into()),
                Tok::Punct(':'),
                Tok::Word("2".into()),
            ]
        );
    }

    #[test]
    fn reports_positions() {
        let err = Cursor::new("a(\n  b, $)").err().unwrap();
        assert_eq!(
            err,
            ParseError::Syntax {
                message: "unexpected character `$`".into(),
                pos: Pos { line: 2, col: 6 }
            }
        );
    }
}
