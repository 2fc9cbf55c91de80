use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Location, Result};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Type {
    Int,
    Rat,
    Bool,
}

impl Type {
    pub fn is_numeric(self) -> bool {
        self != Type::Bool
    }

    pub(crate) fn join(self, other: Type) -> Type {
        if self == Type::Int && other == Type::Int {
            Type::Int
        } else {
            Type::Rat
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Type::Int => "int",
            Type::Rat => "double",
            Type::Bool => "bool",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Num(Rational),
    Bool(bool),
}

impl Value {
    pub fn as_num(&self) -> Result<&Rational> {
        match self {
            Value::Num(r) => Ok(r),
            Value::Bool(_) => Err(Error::Internal("numeric value expected".into())),
        }
    }

    pub fn as_bool(&self) -> Result<bool> {
        match self {
            Value::Bool(b) => Ok(*b),
            Value::Num(_) => Err(Error::Internal("boolean value expected".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Min,
    Max,
    Floor,
    Ceil,
    Mod,
}

/// A resolved, type-checked expression. Constants are folded into
/// literals; variables are indices into the state vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Lit(Value),
    Var(usize),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Lit(_) => true,
            Expr::Var(_) => false,
            Expr::Unary(_, e) => e.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
            Expr::Ite(c, a, b) => c.is_constant() && a.is_constant() && b.is_constant(),
            Expr::Call(_, args) => args.iter().all(Expr::is_constant),
        }
    }

    /// Evaluates under `state`; `at` locates runtime errors.
    pub fn eval(&self, state: &[i64], at: Location) -> Result<Value> {
        let num = |e: &Expr| -> Result<Rational> { e.eval(state, at)?.as_num().cloned() };
        let boolean = |e: &Expr| -> Result<bool> { e.eval(state, at)?.as_bool() };
        Ok(match self {
            Expr::Lit(v) => v.clone(),
            Expr::Var(i) => Value::Num(int(state[*i])),
            Expr::Unary(UnOp::Neg, e) => Value::Num(-num(e)?),
            Expr::Unary(UnOp::Not, e) => Value::Bool(!boolean(e)?),
            Expr::Binary(op, a, b) => match op {
                BinOp::And => Value::Bool(boolean(a)? && boolean(b)?),
                BinOp::Or => Value::Bool(boolean(a)? || boolean(b)?),
                BinOp::Implies => Value::Bool(!boolean(a)? || boolean(b)?),
                BinOp::Eq | BinOp::Ne => {
                    let eq = a.eval(state, at)? == b.eval(state, at)?;
                    Value::Bool(eq == (*op == BinOp::Eq))
                }
                _ => {
                    let (x, y) = (num(a)?, num(b)?);
                    match op {
                        BinOp::Add => Value::Num(x + y),
                        BinOp::Sub => Value::Num(x - y),
                        BinOp::Mul => Value::Num(x * y),
                        BinOp::Div => {
                            if y.is_zero() {
                                return Err(Error::Exploration(format!("division by zero at {at}")));
                            }
                            Value::Num(x / y)
                        }
                        BinOp::Lt => Value::Bool(x < y),
                        BinOp::Le => Value::Bool(x <= y),
                        BinOp::Gt => Value::Bool(x > y),
                        BinOp::Ge => Value::Bool(x >= y),
                        _ => unreachable!("logical operators handled above"),
                    }
                }
            },
            Expr::Ite(c, a, b) => {
                if boolean(c)? {
                    a.eval(state, at)?
                } else {
                    b.eval(state, at)?
                }
            }
            Expr::Call(f, args) => {
                let vals = args.iter().map(num).collect::<Result<Vec<_>>>()?;
                Value::Num(match f {
                    Func::Min => vals.into_iter().min().expect("arity checked"),
                    Func::Max => vals.into_iter().max().expect("arity checked"),
                    Func::Floor => vals[0].floor(),
                    Func::Ceil => vals[0].ceil(),
                    Func::Mod => {
                        if vals[1].is_zero() {
                            return Err(Error::Exploration(format!("mod by zero at {at}")));
                        }
                        let r = &vals[0] % &vals[1];
                        if r.is_negative() {
                            r + vals[1].abs()
                        } else {
                            r
                        }
                    }
                })
            }
        })
    }

    /// Evaluates an integer-typed expression to `i64`.
    pub fn eval_int(&self, state: &[i64], at: Location) -> Result<i64> {
        let v = self.eval(state, at)?;
        let r = v.as_num()?;
        if !r.denom().is_one() {
            return Err(Error::Internal(format!("non-integer value {r} at {at}")));
        }
        r.to_integer()
            .to_i64()
            .ok_or_else(|| Error::Exploration(format!("integer overflow at {at}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub low: i64,
    pub high: i64,
    pub init: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Update {
    pub prob: Expr,
    pub assignments: Vec<(usize, Expr)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Command {
    pub label: Option<String>,
    pub guard: Expr,
    pub updates: Vec<Update>,
    pub location: Location,
}

/// Which actions a reward item applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RewardScope {
    /// No brackets: every action.
    All,
    /// `[]`: actions of unlabelled commands.
    Unlabelled,
    /// `[a]`: actions of commands labelled `a`.
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewardItem {
    pub scope: RewardScope,
    pub guard: Expr,
    pub value: Expr,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewardsDecl {
    pub name: String,
    pub items: Vec<RewardItem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub constants: Vec<(String, Value)>,
    pub module: String,
    pub variables: Vec<Variable>,
    pub commands: Vec<Command>,
    pub rewards: Vec<RewardsDecl>,
}

impl Program {
    /// `x=0,y=1` style rendering of a valuation.
    pub fn valuation(&self, state: &[i64]) -> String {
        self.variables
            .iter()
            .zip(state)
            .map(|(v, x)| format!("{}={x}", v.name))
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub(crate) fn one() -> Value {
    Value::Num(Rational::one())
}
