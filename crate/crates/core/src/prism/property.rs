//! The `multi(...)` / `mlessmulti(...)` property language.
//!
//! ```text
//! prop := ("multi" | "mlessmulti") "(" item ("," item)* ")"
//! item := "R" "{" q name q "}" spec "[" "S" "]"
//! spec := ">=" rat | "<=" rat | "max=?" | "min=?"
//! q    := "'" | '"'
//! ```

use std::fmt;

use num_traits::Signed;

use super::lexer::{lex, Tok, Token};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, parse_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Multi,
    MlessMulti,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Spec {
    Ge(Rational),
    Le(Rational),
    MaxQ,
    MinQ,
}

impl Spec {
    pub fn is_numerical(&self) -> bool {
        matches!(self, Spec::MaxQ | Spec::MinQ)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryItem {
    pub reward: String,
    pub spec: Spec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub kind: QueryKind,
    pub items: Vec<QueryItem>,
}

impl Query {
    pub fn numerical(&self) -> impl Iterator<Item = &QueryItem> {
        self.items.iter().filter(|i| i.spec.is_numerical())
    }

    pub fn boolean(&self) -> impl Iterator<Item = &QueryItem> {
        self.items.iter().filter(|i| !i.spec.is_numerical())
    }
}

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl fmt::Display) -> Result<T> {
        Err(Error::Property(format!(
            "at {}: {message}",
            self.toks[self.pos].loc
        )))
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            ))
        }
    }

    fn word(&mut self, w: &str) -> Result<()> {
        match self.peek() {
            Tok::Ident(s) if s == w => {
                self.bump();
                Ok(())
            }
            other => self.fail(format!("expected `{w}`, found {}", other.describe())),
        }
    }

    fn rational(&mut self) -> Result<Rational> {
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let mut text = match self.peek().clone() {
            Tok::Int(s) | Tok::Decimal(s) => {
                self.bump();
                s
            }
            other => return self.fail(format!("expected a number, found {}", other.describe())),
        };
        if *self.peek() == Tok::Slash {
            self.bump();
            match self.peek().clone() {
                Tok::Int(d) => {
                    self.bump();
                    text = format!("{text}/{d}");
                }
                other => return self.fail(format!("expected a denominator, found {}", other.describe())),
            }
        }
        let r = parse_rational(&text).or_else(|e| self.fail(e))?;
        Ok(if negative { -r } else { r })
    }

    fn spec(&mut self) -> Result<Spec> {
        match self.peek().clone() {
            Tok::Ge => {
                self.bump();
                Ok(Spec::Ge(self.rational()?))
            }
            Tok::Le => {
                self.bump();
                Ok(Spec::Le(self.rational()?))
            }
            Tok::Ident(w) if w == "max" || w == "min" => {
                self.bump();
                self.expect(Tok::Eq)?;
                self.expect(Tok::Question)?;
                Ok(if w == "max" { Spec::MaxQ } else { Spec::MinQ })
            }
            other => self.fail(format!(
                "unknown spec {}; expected >=, <=, max=? or min=?",
                other.describe()
            )),
        }
    }

    fn item(&mut self) -> Result<QueryItem> {
        self.word("R")?;
        self.expect(Tok::LBrace)?;
        let reward = match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                s
            }
            other => {
                return self.fail(format!(
                    "expected a quoted reward name, found {}",
                    other.describe()
                ))
            }
        };
        self.expect(Tok::RBrace)?;
        let spec = self.spec()?;
        self.expect(Tok::LBracket)?;
        self.word("S")?;
        self.expect(Tok::RBracket)?;
        Ok(QueryItem { reward, spec })
    }
}

pub fn parse_property(text: &str) -> Result<Query> {
    let toks = lex(text).map_err(|e| Error::Property(e.to_string()))?;
    let mut c = Cursor { toks, pos: 0 };
    let kind = match c.peek() {
        Tok::Ident(w) if w == "multi" => QueryKind::Multi,
        Tok::Ident(w) if w == "mlessmulti" => QueryKind::MlessMulti,
        other => {
            return c.fail(format!(
                "expected multi or mlessmulti, found {}",
                other.describe()
            ))
        }
    };
    c.bump();
    c.expect(Tok::LParen)?;
    let mut items = vec![c.item()?];
    while *c.peek() == Tok::Comma {
        c.bump();
        items.push(c.item()?);
    }
    c.expect(Tok::RParen)?;
    if *c.peek() != Tok::Eof {
        return c.fail(format!("unexpected {}", c.peek().describe()));
    }
    let query = Query { kind, items };
    let numerical = query.numerical().count();
    if kind == QueryKind::MlessMulti && numerical > 0 {
        return Err(Error::Property(
            "numerical items are not allowed in mlessmulti: the supremum over memoryless strategies might not be realised"
                .into(),
        ));
    }
    if numerical > 2 {
        return Err(Error::Property(format!(
            "at most two numerical items are allowed, found {numerical}"
        )));
    }
    Ok(query)
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.kind {
            QueryKind::Multi => "multi(",
            QueryKind::MlessMulti => "mlessmulti(",
        })?;
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let q = if item.reward.contains('"') { '\'' } else { '"' };
            write!(f, "R{{{q}{}{q}}}", item.reward)?;
            let num = |r: &Rational| {
                if r.is_negative() {
                    format!("-{}", fmt_rational(&-r))
                } else {
                    fmt_rational(r)
                }
            };
            match &item.spec {
                Spec::Ge(r) => write!(f, ">={}", num(r))?,
                Spec::Le(r) => write!(f, "<={}", num(r))?,
                Spec::MaxQ => f.write_str("max=?")?,
                Spec::MinQ => f.write_str("min=?")?,
            }
            f.write_str(" [S]")?;
        }
        f.write_str(")")
    }
}

/// Canonical text of `query`; [`parse_property`] reads it back unchanged.
pub fn print_property(query: &Query) -> String {
    query.to_string()
}
