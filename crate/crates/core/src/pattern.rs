//! Precondition patterns over producer ids.
//!
//! Grammar:
//!
//! ```text
//! pattern     := alternative ( "|" alternative )*
//! alternative := piece+
//! piece       := literal | "*" | group ( "|" group )*
//! group       := "(" literal ")"
//! ```
//!
//! `*` matches any byte sequence, including the empty one. A `|` sitting
//! between two parenthesised groups chooses between those groups only, so
//! `(brill)|(post)-*` reads as "brill or post, then a dash, then anything".
//! Every other `|` separates whole alternatives. Matching is anchored at
//! both ends.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad pattern {pattern:?}: {reason}")]
pub struct PatternError {
    pub pattern: String,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Literal(String),
    Choice(Vec<String>),
    Any,
}

/// A compiled producer-id pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProducerPattern {
    source: String,
    alternatives: Vec<Vec<Piece>>,
}

#[derive(Debug)]
enum Token {
    Literal(String),
    Group(String),
    Star,
    Bar,
}

fn lex(src: &str) -> Result<Vec<Token>, &'static str> {
    let mut tokens = Vec::new();
    let mut lit = String::new();
    let mut chars = src.chars();
    while let Some(c) = chars.next() {
        match c {
            '*' | '|' | '(' => {
                if !lit.is_empty() {
                    tokens.push(Token::Literal(core::mem::take(&mut lit)));
                }
                match c {
                    '*' => tokens.push(Token::Star),
                    '|' => tokens.push(Token::Bar),
                    _ => {
                        let mut inner = String::new();
                        loop {
                            match chars.next() {
                                Some(')') => break,
                                Some('(') => return Err("groups cannot nest"),
                                Some('*') | Some('|') => {
                                    return Err("groups may only hold literals")
                                }
                                Some(ch) => inner.push(ch),
                                None => return Err("unbalanced parenthesis"),
                            }
                        }
                        if inner.is_empty() {
                            return Err("empty group");
                        }
                        tokens.push(Token::Group(inner));
                    }
                }
            }
            ')' => return Err("unbalanced parenthesis"),
            c if c.is_whitespace() => return Err("whitespace in producer pattern"),
            c => lit.push(c),
        }
    }
    if !lit.is_empty() {
        tokens.push(Token::Literal(lit));
    }
    Ok(tokens)
}

impl ProducerPattern {
    pub fn parse(src: &str) -> Result<Self, PatternError> {
        let err = |reason| PatternError {
            pattern: src.to_owned(),
            reason,
        };
        let tokens = lex(src).map_err(err)?;
        let mut alternatives = Vec::new();
        let mut current: Vec<Piece> = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            match &tokens[i] {
                Token::Literal(l) => current.push(Piece::Literal(l.clone())),
                Token::Star => current.push(Piece::Any),
                Token::Group(g) => {
                    let mut options = vec![g.clone()];
                    while let (Some(Token::Bar), Some(Token::Group(next))) =
                        (tokens.get(i + 1), tokens.get(i + 2))
                    {
                        options.push(next.clone());
                        i += 2;
                    }
                    current.push(match options.len() {
                        1 => Piece::Literal(options.pop().unwrap_or_default()),
                        _ => Piece::Choice(options),
                    });
                }
                Token::Bar => {
                    if current.is_empty() {
                        return Err(err("empty alternative"));
                    }
                    alternatives.push(core::mem::take(&mut current));
                }
            }
            i += 1;
        }
        if current.is_empty() {
            return Err(err(if alternatives.is_empty() {
                "empty pattern"
            } else {
                "empty alternative"
            }));
        }
        alternatives.push(current);
        Ok(ProducerPattern {
            source: src.to_owned(),
            alternatives,
        })
    }

    /// Pattern matching exactly one producer id, whatever bytes it holds.
    pub fn exact(id: &str) -> Self {
        ProducerPattern {
            source: id.to_owned(),
            alternatives: vec![vec![Piece::Literal(id.to_owned())]],
        }
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    /// Anchored match against a whole producer id.
    pub fn matches(&self, producer: &str) -> bool {
        self.alternatives
            .iter()
            .any(|alt| match_pieces(alt, producer.as_bytes()))
    }
}

fn match_pieces(pieces: &[Piece], input: &[u8]) -> bool {
    let Some((first, rest)) = pieces.split_first() else {
        return input.is_empty();
    };
    match first {
        Piece::Literal(lit) => input
            .strip_prefix(lit.as_bytes())
            .is_some_and(|tail| match_pieces(rest, tail)),
        Piece::Choice(options) => options.iter().any(|lit| {
            input
                .strip_prefix(lit.as_bytes())
                .is_some_and(|tail| match_pieces(rest, tail))
        }),
        Piece::Any => {
            if rest.is_empty() {
                return true;
            }
            (0..=input.len()).any(|skip| match_pieces(rest, &input[skip..]))
        }
    }
}

impl fmt::Display for ProducerPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// A module precondition: a producer pattern plus a literal result label,
/// written `<producer-pattern> <label>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreconditionPattern {
    pub producer: ProducerPattern,
    pub label: String,
}

impl PreconditionPattern {
    pub fn parse(src: &str) -> Result<Self, PatternError> {
        let mut parts = src.split_whitespace();
        let (Some(producer), Some(label), None) = (parts.next(), parts.next(), parts.next())
        else {
            return Err(PatternError {
                pattern: src.to_owned(),
                reason: "expected `<producer-pattern> <label>`",
            });
        };
        Ok(PreconditionPattern {
            producer: ProducerPattern::parse(producer)?,
            label: label.to_owned(),
        })
    }

    /// Label equality plus an anchored producer match.
    pub fn matches(&self, producer: &str, label: &str) -> bool {
        self.label == label && self.producer.matches(producer)
    }
}

impl fmt::Display for PreconditionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.producer, self.label)
    }
}
