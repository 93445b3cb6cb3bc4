//! Parser for decomposition-tree expressions:
//! `expr := IDENT | "(" ("S"|"P") expr expr+ ")"`.

use symanzik::spbuild::SPTree;
use thiserror::Error;

/// Parse failure; `position` is a byte offset into the input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Ident(&'a str),
}

fn tokenize(input: &str) -> Vec<(usize, Token<'_>)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in input.char_indices() {
        let delimiter = c.is_whitespace() || c == '(' || c == ')';
        if delimiter {
            if let Some(s) = start.take() {
                out.push((s, Token::Ident(&input[s..i])));
            }
            match c {
                '(' => out.push((i, Token::Open)),
                ')' => out.push((i, Token::Close)),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, Token::Ident(&input[s..])));
    }
    out
}

struct Parser<'a> {
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, position: usize, message: impl Into<String>) -> ParseError {
        ParseError { position, message: message.into() }
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn expr(&mut self) -> Result<SPTree, ParseError> {
        let at = self.here();
        match self.tokens.get(self.pos) {
            None => Err(self.error(at, "unexpected end of input, expected an expression")),
            Some((_, Token::Close)) => Err(self.error(at, "unexpected `)`")),
            Some((_, Token::Ident(id))) => {
                self.pos += 1;
                Ok(SPTree::leaf(*id))
            }
            Some((_, Token::Open)) => {
                self.pos += 1;
                let kind_at = self.here();
                let series = match self.tokens.get(self.pos) {
                    Some((_, Token::Ident("S"))) => true,
                    Some((_, Token::Ident("P"))) => false,
                    _ => return Err(self.error(kind_at, "expected `S` or `P` after `(`")),
                };
                self.pos += 1;
                let mut children = Vec::new();
                loop {
                    match self.tokens.get(self.pos) {
                        Some((_, Token::Close)) => break,
                        None => return Err(self.error(self.end, format!("unclosed `(` opened at position {at}"))),
                        _ => children.push(self.expr()?),
                    }
                }
                if children.len() < 2 {
                    return Err(self.error(at, "a join needs at least two operands"));
                }
                self.pos += 1;
                Ok(if series { SPTree::Series(children) } else { SPTree::Parallel(children) })
            }
        }
    }
}

pub fn parse_sp(input: &str) -> Result<SPTree, ParseError> {
    let mut p = Parser { tokens: tokenize(input), pos: 0, end: input.len() };
    let tree = p.expr()?;
    if p.pos < p.tokens.len() {
        return Err(p.error(p.here(), "trailing input after expression"));
    }
    tree.validate().map_err(|e| ParseError { position: 0, message: e.to_string() })?;
    Ok(tree)
}
