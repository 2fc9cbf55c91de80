use std::collections::HashMap;

use num_traits::{One, Zero};

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use crate::error::{Error, Location, Result};
use crate::rational::{parse_rational, Rational};

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    consts: HashMap<String, (Value, Type)>,
    vars: HashMap<String, usize>,
}

type Typed = (Expr, Type);

const RESERVED: &[&str] = &[
    "module",
    "endmodule",
    "const",
    "int",
    "double",
    "bool",
    "init",
    "rewards",
    "endrewards",
    "true",
    "false",
    "min",
    "max",
    "floor",
    "ceil",
    "mod",
    "mdp",
    "nondeterministic",
];

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self> {
        Ok(Self {
            toks: lex(text)?,
            pos: 0,
            consts: HashMap::new(),
            vars: HashMap::new(),
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub(crate) fn loc(&self) -> Location {
        self.toks[self.pos].loc
    }

    pub(crate) fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            location: self.loc(),
            message: message.into(),
        })
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> Result<Location> {
        if *self.peek() == tok {
            Ok(self.bump().loc)
        } else {
            self.error(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            ))
        }
    }

    pub(crate) fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub(crate) fn keyword(&mut self, kw: &str) -> Result<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{kw}`, found {}", self.peek().describe()))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<(String, Location)> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let loc = self.bump().loc;
                Ok((s, loc))
            }
            other => self.error(format!("expected identifier, found {}", other.describe())),
        }
    }

    pub(crate) fn program(&mut self) -> Result<Program> {
        if self.is_keyword("mdp") || self.is_keyword("nondeterministic") {
            self.bump();
        } else if let Tok::Ident(k) = self.peek() {
            if ["dtmc", "ctmc", "pta", "probabilistic", "stochastic"].contains(&k.as_str()) {
                return self.error(format!("model type `{k}` is not supported; only mdp"));
            }
        }
        let mut constants = Vec::new();
        while self.is_keyword("const") {
            constants.push(self.constant()?);
        }
        self.keyword("module")?;
        let (module, _) = self.ident()?;
        let mut variables = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) && !self.is_keyword("endmodule") {
            variables.push(self.variable(variables.len())?);
        }
        let mut commands = Vec::new();
        while *self.peek() == Tok::LBracket {
            commands.push(self.command()?);
        }
        self.keyword("endmodule")?;
        let mut rewards = Vec::new();
        loop {
            if self.is_keyword("const") {
                return self.error("constants must be declared before the module");
            }
            if !self.is_keyword("rewards") {
                break;
            }
            rewards.push(self.rewards()?);
        }
        if *self.peek() != Tok::Eof {
            return self.error(format!("unexpected {}", self.peek().describe()));
        }
        Ok(Program {
            constants,
            module,
            variables,
            commands,
            rewards,
        })
    }

    fn constant(&mut self) -> Result<(String, Value)> {
        self.keyword("const")?;
        let declared = if self.is_keyword("int") {
            Some(Type::Int)
        } else if self.is_keyword("double") {
            Some(Type::Rat)
        } else if self.is_keyword("bool") {
            Some(Type::Bool)
        } else {
            None
        };
        if declared.is_some() {
            self.bump();
        }
        let (name, loc) = self.ident()?;
        if self.consts.contains_key(&name) {
            return Err(Error::Parse {
                location: loc,
                message: format!("constant {name} declared twice"),
            });
        }
        self.expect(Tok::Eq)?;
        let at = self.loc();
        let (e, ty) = self.expr()?;
        let ty = match (declared, ty) {
            (None, t) => t,
            (Some(Type::Rat), Type::Int) => Type::Rat,
            (Some(d), t) if d == t => d,
            (Some(d), t) => {
                return Err(Error::Type {
                    location: at,
                    message: format!("constant {name} declared {d} but defined as {t}"),
                })
            }
        };
        let v = e.eval(&[], at)?;
        self.expect(Tok::Semi)?;
        self.consts.insert(name.clone(), (v.clone(), ty));
        Ok((name, v))
    }

    fn const_int(&mut self) -> Result<i64> {
        let at = self.loc();
        let (e, ty) = self.expr()?;
        if ty != Type::Int {
            return Err(Error::Type {
                location: at,
                message: format!("expected int, found {ty}"),
            });
        }
        if !e.is_constant() {
            return Err(Error::Parse {
                location: at,
                message: "expected a constant expression".into(),
            });
        }
        e.eval_int(&[], at)
    }

    fn variable(&mut self, index: usize) -> Result<Variable> {
        let (name, loc) = self.ident()?;
        if self.vars.contains_key(&name) || self.consts.contains_key(&name) {
            return Err(Error::Parse {
                location: loc,
                message: format!("{name} declared twice"),
            });
        }
        self.expect(Tok::Colon)?;
        if self.is_keyword("bool") {
            return self.error("boolean variables are not supported; use [0..1]");
        }
        self.expect(Tok::LBracket)?;
        let low = self.const_int()?;
        self.expect(Tok::DotDot)?;
        let high = self.const_int()?;
        self.expect(Tok::RBracket)?;
        if low > high {
            return Err(Error::Parse {
                location: loc,
                message: format!("empty range [{low}..{high}] for {name}"),
            });
        }
        let init = if self.is_keyword("init") {
            self.bump();
            let at = self.loc();
            let v = self.const_int()?;
            if v < low || v > high {
                return Err(Error::Parse {
                    location: at,
                    message: format!("initial value {v} outside [{low}..{high}]"),
                });
            }
            v
        } else {
            low
        };
        self.expect(Tok::Semi)?;
        self.vars.insert(name.clone(), index);
        Ok(Variable {
            name,
            low,
            high,
            init,
        })
    }

    fn label(&mut self) -> Result<Option<String>> {
        self.expect(Tok::LBracket)?;
        let label = if *self.peek() == Tok::RBracket {
            None
        } else {
            Some(self.ident()?.0)
        };
        self.expect(Tok::RBracket)?;
        Ok(label)
    }

    fn command(&mut self) -> Result<Command> {
        let location = self.loc();
        let label = self.label()?;
        let guard = self.boolean()?;
        self.expect(Tok::Arrow)?;
        let mut updates = vec![self.update()?];
        while *self.peek() == Tok::Plus {
            self.bump();
            updates.push(self.update()?);
        }
        self.expect(Tok::Semi)?;
        if updates.iter().all(|u| u.prob.is_constant()) {
            let mut total = Rational::zero();
            for u in &updates {
                total += u.prob.eval(&[], location)?.as_num()?;
            }
            if !total.is_one() {
                return Err(Error::Parse {
                    location,
                    message: format!("update probabilities sum to {total}"),
                });
            }
        }
        Ok(Command {
            label,
            guard,
            updates,
            location,
        })
    }

    fn starts_assignments(&self) -> bool {
        (*self.peek() == Tok::LParen
            && matches!(self.peek_at(1), Tok::Ident(_))
            && *self.peek_at(2) == Tok::Prime)
            || (self.is_keyword("true") && matches!(self.peek_at(1), Tok::Plus | Tok::Semi))
    }

    fn update(&mut self) -> Result<Update> {
        let prob = if self.starts_assignments() {
            Expr::Lit(one())
        } else {
            let at = self.loc();
            let (e, ty) = self.expr()?;
            if !ty.is_numeric() {
                return Err(Error::Type {
                    location: at,
                    message: format!("update probability must be numeric, found {ty}"),
                });
            }
            self.expect(Tok::Colon)?;
            e
        };
        let mut assignments = Vec::new();
        if self.is_keyword("true") {
            self.bump();
            return Ok(Update { prob, assignments });
        }
        loop {
            self.expect(Tok::LParen)?;
            let (name, loc) = match self.peek().clone() {
                Tok::Ident(s) => (s, self.bump().loc),
                other => return self.error(format!("expected variable, found {}", other.describe())),
            };
            let Some(&var) = self.vars.get(&name) else {
                return Err(Error::Undeclared { name, location: loc });
            };
            if assignments.iter().any(|(v, _)| *v == var) {
                return Err(Error::Parse {
                    location: loc,
                    message: format!("{name} assigned twice"),
                });
            }
            self.expect(Tok::Prime)?;
            self.expect(Tok::Eq)?;
            let at = self.loc();
            let (e, ty) = self.expr()?;
            if ty != Type::Int {
                return Err(Error::Type {
                    location: at,
                    message: format!("cannot assign {ty} value to integer variable {name}"),
                });
            }
            self.expect(Tok::RParen)?;
            assignments.push((var, e));
            if *self.peek() == Tok::And {
                self.bump();
            } else {
                break;
            }
        }
        Ok(Update { prob, assignments })
    }

    fn rewards(&mut self) -> Result<RewardsDecl> {
        self.keyword("rewards")?;
        let name = match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                s
            }
            other => {
                return self.error(format!(
                    "expected reward structure name, found {}",
                    other.describe()
                ))
            }
        };
        let mut items = Vec::new();
        while !self.is_keyword("endrewards") {
            let location = self.loc();
            let scope = if *self.peek() == Tok::LBracket {
                match self.label()? {
                    None => RewardScope::Unlabelled,
                    Some(l) => RewardScope::Label(l),
                }
            } else {
                RewardScope::All
            };
            let guard = self.boolean()?;
            self.expect(Tok::Colon)?;
            let at = self.loc();
            let (value, ty) = self.expr()?;
            if !ty.is_numeric() {
                return Err(Error::Type {
                    location: at,
                    message: format!("reward must be numeric, found {ty}"),
                });
            }
            self.expect(Tok::Semi)?;
            items.push(RewardItem {
                scope,
                guard,
                value,
                location,
            });
        }
        self.keyword("endrewards")?;
        Ok(RewardsDecl { name, items })
    }

    fn boolean(&mut self) -> Result<Expr> {
        let at = self.loc();
        let (e, ty) = self.expr()?;
        if ty != Type::Bool {
            return Err(Error::Type {
                location: at,
                message: format!("expected bool, found {ty}"),
            });
        }
        Ok(e)
    }

    // Precedence, loosest first: ?:, =>, |, &, !, relations, + -, * /, unary -.

    pub(crate) fn expr(&mut self) -> Result<Typed> {
        let at = self.loc();
        let c = self.implies()?;
        if *self.peek() != Tok::Question {
            return Ok(c);
        }
        let q = self.bump().loc;
        if c.1 != Type::Bool {
            return type_error(at, format!("condition of `?` must be bool, found {}", c.1));
        }
        let a = self.expr()?;
        self.expect(Tok::Colon)?;
        let b = self.expr()?;
        let ty = match (a.1, b.1) {
            (Type::Bool, Type::Bool) => Type::Bool,
            (x, y) if x.is_numeric() && y.is_numeric() => x.join(y),
            (x, y) => return type_error(q, format!("branches of `?` have types {x} and {y}")),
        };
        Ok((Expr::Ite(Box::new(c.0), Box::new(a.0), Box::new(b.0)), ty))
    }

    fn implies(&mut self) -> Result<Typed> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            let at = self.bump().loc;
            let rhs = self.implies()?;
            return logical(BinOp::Implies, lhs, rhs, at, "=>");
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Typed> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            let at = self.bump().loc;
            let rhs = self.and()?;
            lhs = logical(BinOp::Or, lhs, rhs, at, "|")?;
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Typed> {
        let mut lhs = self.not()?;
        while *self.peek() == Tok::And {
            let at = self.bump().loc;
            let rhs = self.not()?;
            lhs = logical(BinOp::And, lhs, rhs, at, "&")?;
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Typed> {
        if *self.peek() == Tok::Not {
            let at = self.bump().loc;
            let (e, ty) = self.not()?;
            if ty != Type::Bool {
                return type_error(at, format!("operator `!` expects bool, found {ty}"));
            }
            return Ok((Expr::Unary(UnOp::Not, Box::new(e)), Type::Bool));
        }
        self.relation()
    }

    fn relation(&mut self) -> Result<Typed> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        let at = self.bump().loc;
        let rhs = self.additive()?;
        let ok = match op {
            BinOp::Eq | BinOp::Ne => {
                (lhs.1.is_numeric() && rhs.1.is_numeric()) || (lhs.1 == Type::Bool && rhs.1 == Type::Bool)
            }
            _ => lhs.1.is_numeric() && rhs.1.is_numeric(),
        };
        if !ok {
            return type_error(at, format!("cannot compare {} with {}", lhs.1, rhs.1));
        }
        Ok((Expr::Binary(op, Box::new(lhs.0), Box::new(rhs.0)), Type::Bool))
    }

    fn additive(&mut self) -> Result<Typed> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let at = self.bump().loc;
            let rhs = self.multiplicative()?;
            lhs = arith(op, lhs, rhs, at)?;
        }
    }

    fn multiplicative(&mut self) -> Result<Typed> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            let at = self.bump().loc;
            let rhs = self.unary()?;
            lhs = arith(op, lhs, rhs, at)?;
        }
    }

    fn unary(&mut self) -> Result<Typed> {
        if *self.peek() == Tok::Minus {
            let at = self.bump().loc;
            let (e, ty) = self.unary()?;
            if !ty.is_numeric() {
                return type_error(at, format!("operator `-` expects a number, found {ty}"));
            }
            return Ok((fold(Expr::Unary(UnOp::Neg, Box::new(e)), at)?, ty));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Typed> {
        let at = self.loc();
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                let r = parse_rational(&s).map_err(|m| Error::Parse {
                    location: at,
                    message: m,
                })?;
                Ok((Expr::Lit(Value::Num(r)), Type::Int))
            }
            Tok::Decimal(s) => {
                self.bump();
                let r = parse_rational(&s).map_err(|m| Error::Parse {
                    location: at,
                    message: m,
                })?;
                Ok((Expr::Lit(Value::Num(r)), Type::Rat))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "true" => return Ok((Expr::Lit(Value::Bool(true)), Type::Bool)),
                    "false" => return Ok((Expr::Lit(Value::Bool(false)), Type::Bool)),
                    "min" | "max" | "floor" | "ceil" | "mod" => return self.call(&name, at),
                    _ => {}
                }
                if let Some((v, ty)) = self.consts.get(&name) {
                    return Ok((Expr::Lit(v.clone()), *ty));
                }
                if let Some(&i) = self.vars.get(&name) {
                    return Ok((Expr::Var(i), Type::Int));
                }
                Err(Error::Undeclared { name, location: at })
            }
            other => self.error(format!("expected expression, found {}", other.describe())),
        }
    }

    fn call(&mut self, name: &str, at: Location) -> Result<Typed> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen)?;
        if let Some((_, ty)) = args.iter().find(|(_, t)| !t.is_numeric()) {
            return type_error(at, format!("{name} expects numbers, found {ty}"));
        }
        let join = args.iter().fold(Type::Int, |acc, (_, t)| acc.join(*t));
        let (f, arity, ty) = match name {
            "min" => (Func::Min, None, join),
            "max" => (Func::Max, None, join),
            "floor" => (Func::Floor, Some(1), Type::Int),
            "ceil" => (Func::Ceil, Some(1), Type::Int),
            _ => {
                if join != Type::Int {
                    return type_error(at, "mod expects int arguments");
                }
                (Func::Mod, Some(2), Type::Int)
            }
        };
        if arity.is_some_and(|n| n != args.len()) {
            return Err(Error::Parse {
                location: at,
                message: format!("{name} takes {} argument(s)", arity.unwrap_or_default()),
            });
        }
        Ok((
            fold(Expr::Call(f, args.into_iter().map(|(e, _)| e).collect()), at)?,
            ty,
        ))
    }
}

fn type_error<T>(location: Location, message: impl Into<String>) -> Result<T> {
    Err(Error::Type {
        location,
        message: message.into(),
    })
}

/// Evaluates constant subexpressions so constants stay literals.
fn fold(e: Expr, at: Location) -> Result<Expr> {
    if e.is_constant() && !matches!(e, Expr::Lit(_)) {
        let v = e.eval(&[], at)?;
        return Ok(Expr::Lit(v));
    }
    Ok(e)
}

fn logical(op: BinOp, lhs: Typed, rhs: Typed, at: Location, sym: &str) -> Result<Typed> {
    if lhs.1 != Type::Bool || rhs.1 != Type::Bool {
        return type_error(
            at,
            format!(
                "operator `{sym}` expects bool operands, found {} and {}",
                lhs.1, rhs.1
            ),
        );
    }
    Ok((Expr::Binary(op, Box::new(lhs.0), Box::new(rhs.0)), Type::Bool))
}

fn arith(op: BinOp, lhs: Typed, rhs: Typed, at: Location) -> Result<Typed> {
    if !lhs.1.is_numeric() || !rhs.1.is_numeric() {
        return type_error(at, format!("arithmetic on {} and {}", lhs.1, rhs.1));
    }
    let ty = if op == BinOp::Div {
        Type::Rat
    } else {
        lhs.1.join(rhs.1)
    };
    Ok((fold(Expr::Binary(op, Box::new(lhs.0), Box::new(rhs.0)), at)?, ty))
}
