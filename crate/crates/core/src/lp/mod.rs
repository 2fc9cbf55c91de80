//! Exact linear programming over the rationals.
//!
//! [`LinearProgram`] is a plain constraint system; [`solve_lp`] runs a
//! two-phase primal simplex with Bland's rule on a dense rational tableau.
//! [`DisjunctiveProgram`] adds clauses (disjunctions of conjunctions of
//! atoms, including strict `> c` atoms) and is decided by
//! [`solve_disjunctive`]. Both can be written in CPLEX LP format.

mod disjunctive;
mod export;
mod simplex;

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::rational::Rational;

pub use disjunctive::{
    solve_disjunctive, solve_disjunctive_counted, Atom, AtomRelation, Clause, DisjunctiveProgram,
};
pub use export::{export_disjunctive, export_lp, ExportOptions};
pub use simplex::solve_lp;

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub bound: VarBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// A sparse linear expression. Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinExpr {
    terms: BTreeMap<VarId, Rational>,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(v: VarId) -> Self {
        Self::new().plus(v, Rational::from_integer(1.into()))
    }

    pub fn plus(mut self, v: VarId, c: Rational) -> Self {
        self.add_term(v, &c);
        self
    }

    pub fn add_term(&mut self, v: VarId, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(v).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&v);
        }
    }

    pub fn add_expr(&mut self, other: &LinExpr, scale: &Rational) {
        for (v, c) in &other.terms {
            self.add_term(*v, &(c * scale));
        }
    }

    pub fn coeff(&self, v: VarId) -> Rational {
        self.terms.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (VarId, &Rational)> {
        self.terms.iter().map(|(v, c)| (*v, c))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, assignment: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(v, c)| c * &assignment[*v])
            .fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl FromIterator<(VarId, Rational)> for LinExpr {
    fn from_iter<I: IntoIterator<Item = (VarId, Rational)>>(iter: I) -> Self {
        let mut e = LinExpr::new();
        for (v, c) in iter {
            e.add_term(v, &c);
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub label: Option<String>,
    pub expr: LinExpr,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn holds(&self, assignment: &[Rational]) -> bool {
        self.relation.holds(&self.expr.eval(assignment), &self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub expr: LinExpr,
    pub sense: Sense,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearProgram {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Option<Objective>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, bound: VarBound) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            bound,
        });
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, expr: LinExpr, relation: Relation, rhs: Rational) -> usize {
        self.constraints.push(Constraint {
            label: None,
            expr,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn add_labeled(
        &mut self,
        label: impl Into<String>,
        expr: LinExpr,
        relation: Relation,
        rhs: Rational,
    ) -> usize {
        let i = self.add_constraint(expr, relation, rhs);
        self.constraints[i].label = Some(label.into());
        i
    }

    pub fn set_objective(&mut self, expr: LinExpr, sense: Sense) {
        self.objective = Some(Objective { expr, sense });
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Descriptions of every constraint or bound the assignment violates.
    pub fn violations(&self, assignment: &[Rational]) -> Vec<String> {
        let mut out = Vec::new();
        if assignment.len() != self.variables.len() {
            out.push(format!(
                "assignment has {} values for {} variables",
                assignment.len(),
                self.variables.len()
            ));
            return out;
        }
        for (v, var) in self.variables.iter().enumerate() {
            if var.bound == VarBound::NonNegative && assignment[v] < Rational::zero() {
                out.push(format!("{} = {} is negative", var.name, assignment[v]));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.holds(assignment) {
                out.push(format!(
                    "row {} ({}): {} {} {} fails",
                    i,
                    c.label.as_deref().unwrap_or("-"),
                    c.expr.eval(assignment),
                    c.relation.symbol(),
                    c.rhs
                ));
            }
        }
        out
    }

    pub fn is_satisfied_by(&self, assignment: &[Rational]) -> bool {
        self.violations(assignment).is_empty()
    }
}

pub type Assignment = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// No objective was given and the constraints are satisfiable.
    Feasible(Assignment),
    Optimal {
        assignment: Assignment,
        value: Rational,
    },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn assignment(&self) -> Option<&Assignment> {
        match self {
            LpOutcome::Feasible(a) | LpOutcome::Optimal { assignment: a, .. } => Some(a),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}
