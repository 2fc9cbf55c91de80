//! The explicit line-oriented model format.
//!
//! ```text
//! mdp
//! # comment
//! state s0
//! state s1
//! action go from s0 reward r1=1 r2=0 -> s0:1/2, s1:0.5
//! action loop from s1 -> s1:1
//! initial s0
//! ```
//!
//! Names may not contain whitespace or any of `, : = #`. Forward references
//! to states are allowed. Reward structures are created in order of first
//! mention.

use std::collections::HashMap;

use super::{MdpBuilder, Model, RewardStructure};
use crate::error::{Error, Location, Result};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Word(&'a str),
    Arrow,
    Comma,
    Colon,
    Eq,
}

fn lex_line(line: &str) -> Vec<(usize, Tok<'_>)> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let col = i + 1;
        match c {
            b'#' => break,
            b',' => {
                out.push((col, Tok::Comma));
                i += 1;
            }
            b':' => {
                out.push((col, Tok::Colon));
                i += 1;
            }
            b'=' => {
                out.push((col, Tok::Eq));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((col, Tok::Arrow));
                i += 2;
            }
            _ => {
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i];
                    if c.is_ascii_whitespace()
                        || matches!(c, b',' | b':' | b'=' | b'#')
                        || (c == b'-' && bytes.get(i + 1) == Some(&b'>'))
                    {
                        break;
                    }
                    i += 1;
                }
                out.push((col, Tok::Word(&line[start..i])));
            }
        }
    }
    out
}

struct LineCursor<'a> {
    line_no: usize,
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    end_col: usize,
}

impl<'a> LineCursor<'a> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end_col)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line_no, self.col(), msg)
    }

    fn peek(&self) -> Option<&Tok<'a>> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn word(&mut self, what: &str) -> Result<(&'a str, Location)> {
        let loc = Location {
            line: self.line_no,
            column: self.col(),
        };
        match self.toks.get(self.pos) {
            Some((_, Tok::Word(w))) => {
                self.pos += 1;
                Ok((w, loc))
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Word(w)) if *w == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected `{kw}`"))),
        }
    }

    fn punct(&mut self, tok: Tok<'static>, shown: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{shown}`")))
        }
    }

    fn rational(&mut self) -> Result<Rational> {
        let col = self.col();
        let (w, _) = self.word("a number")?;
        parse_rational(w).map_err(|m| Error::parse(self.line_no, col, m))
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            Err(self.err("unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}

struct PendingAction {
    name: String,
    source: (String, Location),
    rewards: Vec<(String, Rational)>,
    successors: Vec<(String, Location, Rational)>,
}

/// Parses and validates an explicit-format document.
pub fn load_explicit_model(text: &str) -> Result<Model> {
    let mut seen_header = false;
    let mut states: Vec<String> = Vec::new();
    let mut state_index: HashMap<String, usize> = HashMap::new();
    let mut actions: Vec<PendingAction> = Vec::new();
    let mut initial: Option<(String, Location)> = None;
    let mut reward_order: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = lex_line(raw);
        if toks.is_empty() {
            continue;
        }
        let mut cur = LineCursor {
            line_no,
            toks,
            pos: 0,
            end_col: raw.len() + 1,
        };
        if !seen_header {
            cur.keyword("mdp")?;
            cur.finish()?;
            seen_header = true;
            continue;
        }
        let (kw, loc) = cur.word("a declaration")?;
        match kw {
            "state" => {
                let (name, loc) = cur.word("a state name")?;
                cur.finish()?;
                if state_index.contains_key(name) {
                    return Err(Error::parse(
                        loc.line,
                        loc.column,
                        format!("duplicate state {name}"),
                    ));
                }
                state_index.insert(name.to_string(), states.len());
                states.push(name.to_string());
            }
            "action" => {
                let (name, _) = cur.word("an action name")?;
                cur.keyword("from")?;
                let (src, src_loc) = cur.word("a source state")?;
                let mut rewards = Vec::new();
                while cur.peek() == Some(&Tok::Word("reward")) {
                    cur.pos += 1;
                    loop {
                        let (rname, _) = cur.word("a reward name")?;
                        cur.punct(Tok::Eq, "=")?;
                        let value = cur.rational()?;
                        if !reward_order.iter().any(|r| r == rname) {
                            reward_order.push(rname.to_string());
                        }
                        rewards.push((rname.to_string(), value));
                        match cur.peek() {
                            Some(Tok::Word(w)) if *w != "reward" => continue,
                            _ => break,
                        }
                    }
                }
                cur.punct(Tok::Arrow, "->")?;
                let mut successors = Vec::new();
                loop {
                    let (t, tloc) = cur.word("a successor state")?;
                    cur.punct(Tok::Colon, ":")?;
                    let p = cur.rational()?;
                    successors.push((t.to_string(), tloc, p));
                    if cur.peek() == Some(&Tok::Comma) {
                        cur.pos += 1;
                    } else {
                        break;
                    }
                }
                cur.finish()?;
                actions.push(PendingAction {
                    name: name.to_string(),
                    source: (src.to_string(), src_loc),
                    rewards,
                    successors,
                });
            }
            "initial" => {
                let (name, loc) = cur.word("a state name")?;
                cur.finish()?;
                if initial.is_some() {
                    return Err(Error::parse(loc.line, loc.column, "initial state given twice"));
                }
                initial = Some((name.to_string(), loc));
            }
            other => {
                return Err(Error::parse(
                    loc.line,
                    loc.column,
                    format!("unknown declaration `{other}`"),
                ))
            }
        }
    }
    if !seen_header {
        return Err(Error::parse(1, 1, "expected `mdp`"));
    }

    let resolve = |name: &str, loc: Location| -> Result<usize> {
        state_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::parse(loc.line, loc.column, format!("undeclared state {name}")))
    };

    let mut b = MdpBuilder::new();
    for s in &states {
        b.add_state(s.clone());
    }
    let mut structures: Vec<RewardStructure> = reward_order.iter().map(RewardStructure::new).collect();
    for act in &actions {
        let src = resolve(&act.source.0, act.source.1)?;
        let succ = act
            .successors
            .iter()
            .map(|(t, loc, p)| Ok((resolve(t, *loc)?, p.clone())))
            .collect::<Result<Vec<_>>>()?;
        let id = b.add_action(act.name.clone(), src, succ);
        for (rname, v) in &act.rewards {
            let k = reward_order.iter().position(|r| r == rname).unwrap();
            structures[k].add(id, v);
        }
    }
    let (init, loc) = initial
        .ok_or_else(|| Error::parse(text.lines().count().max(1), 1, "missing `initial` declaration"))?;
    b.set_initial(resolve(&init, loc)?);
    let mdp = b.build()?;
    Ok(Model {
        mdp,
        rewards: structures,
    })
}

/// Serializes a model so that [`load_explicit_model`] returns it unchanged.
pub fn write_explicit_model(model: &Model) -> String {
    let mdp = &model.mdp;
    let mut out = String::from("mdp\n");
    for name in mdp.state_names() {
        out.push_str(&format!("state {name}\n"));
    }
    for (a, act) in mdp.actions().iter().enumerate() {
        out.push_str(&format!(
            "action {} from {}",
            act.name,
            mdp.state_name(act.source)
        ));
        let mut entries = Vec::new();
        for r in &model.rewards {
            let v = r.get(a);
            // action 0 mentions every structure so their order survives
            if a == 0 || v != Rational::from_integer(0.into()) {
                entries.push(format!("{}={}", r.name, v));
            }
        }
        if !entries.is_empty() {
            out.push_str(" reward ");
            out.push_str(&entries.join(" "));
        }
        let succ: Vec<String> = act
            .successors
            .iter()
            .map(|(t, p)| format!("{}:{}", mdp.state_name(*t), p))
            .collect();
        out.push_str(" -> ");
        out.push_str(&succ.join(", "));
        out.push('\n');
    }
    out.push_str(&format!("initial {}\n", mdp.state_name(mdp.initial())));
    out
}
