use num_traits::{One, Signed, Zero};

use super::{solve_lp, Assignment, LinExpr, LinearProgram, LpOutcome, Relation, Sense, VarBound};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomRelation {
    Le,
    Eq,
    Ge,
    /// Strict `expr > rhs`.
    Gt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub expr: LinExpr,
    pub relation: AtomRelation,
    pub rhs: Rational,
    /// Big-M used when this atom is exported with an indicator variable.
    pub big_m: Option<Rational>,
}

impl Atom {
    pub fn new(expr: LinExpr, relation: AtomRelation, rhs: Rational) -> Self {
        Self {
            expr,
            relation,
            rhs,
            big_m: None,
        }
    }

    pub fn holds(&self, assignment: &[Rational]) -> bool {
        let lhs = self.expr.eval(assignment);
        match self.relation {
            AtomRelation::Le => lhs <= self.rhs,
            AtomRelation::Eq => lhs == self.rhs,
            AtomRelation::Ge => lhs >= self.rhs,
            AtomRelation::Gt => lhs > self.rhs,
        }
    }

    pub fn is_strict(&self) -> bool {
        self.relation == AtomRelation::Gt
    }
}

/// A disjunction of conjunctions of atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub disjuncts: Vec<Vec<Atom>>,
}

impl Clause {
    pub fn holds(&self, assignment: &[Rational]) -> bool {
        self.disjuncts
            .iter()
            .any(|d| d.iter().all(|atom| atom.holds(assignment)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DisjunctiveProgram {
    pub base: LinearProgram,
    pub clauses: Vec<Clause>,
}

impl DisjunctiveProgram {
    pub fn is_satisfied_by(&self, assignment: &[Rational]) -> bool {
        self.base.is_satisfied_by(assignment) && self.clauses.iter().all(|c| c.holds(assignment))
    }
}

/// Decides feasibility of a disjunctive program exactly.
///
/// Returns [`LpOutcome::Feasible`] with an assignment satisfying the base
/// system and every clause, or [`LpOutcome::Infeasible`].
pub fn solve_disjunctive(dp: &DisjunctiveProgram) -> LpOutcome {
    solve_disjunctive_counted(dp).0
}

/// [`solve_disjunctive`] plus the number of search nodes (LP solves).
///
/// Each node solves the base system with the asserted disjuncts, where
/// strict atoms `e > c` become `e - t >= c` and `t` (bounded by 1) is
/// maximized; the node is dead when that LP is infeasible or `t* = 0`.
/// Otherwise, if the node's assignment already satisfies every clause it is
/// returned; else the first clause (input order) it violates is branched on,
/// disjuncts in input order.
pub fn solve_disjunctive_counted(dp: &DisjunctiveProgram) -> (LpOutcome, usize) {
    let mut search = Search {
        dp,
        asserted: Vec::new(),
        decided: vec![false; dp.clauses.len()],
        nodes: 0,
    };
    let outcome = match search.node() {
        Some(a) => {
            debug_assert!(dp.is_satisfied_by(&a));
            LpOutcome::Feasible(a)
        }
        None => LpOutcome::Infeasible,
    };
    (outcome, search.nodes)
}

struct Search<'a> {
    dp: &'a DisjunctiveProgram,
    asserted: Vec<(usize, usize)>,
    decided: Vec<bool>,
    nodes: usize,
}

impl Search<'_> {
    fn node(&mut self) -> Option<Assignment> {
        self.nodes += 1;
        let assignment = self.solve_node()?;
        let violated =
            (0..self.dp.clauses.len()).find(|&c| !self.decided[c] && !self.dp.clauses[c].holds(&assignment));
        let Some(c) = violated else {
            return Some(assignment);
        };
        self.decided[c] = true;
        for k in 0..self.dp.clauses[c].disjuncts.len() {
            self.asserted.push((c, k));
            let found = self.node();
            self.asserted.pop();
            if found.is_some() {
                self.decided[c] = false;
                return found;
            }
        }
        self.decided[c] = false;
        None
    }

    fn solve_node(&self) -> Option<Assignment> {
        let mut lp = self.dp.base.clone();
        lp.objective = None;
        let nvars = lp.num_vars();
        let atoms = self
            .asserted
            .iter()
            .flat_map(|&(c, k)| self.dp.clauses[c].disjuncts[k].iter());
        let strict: Vec<&Atom> = atoms.clone().filter(|a| a.is_strict()).collect();
        for atom in atoms.filter(|a| !a.is_strict()) {
            let rel = match atom.relation {
                AtomRelation::Le => Relation::Le,
                AtomRelation::Eq => Relation::Eq,
                AtomRelation::Ge => Relation::Ge,
                AtomRelation::Gt => unreachable!(),
            };
            lp.add_constraint(atom.expr.clone(), rel, atom.rhs.clone());
        }
        if strict.is_empty() {
            let mut a = solve_lp(&lp).assignment()?.clone();
            a.truncate(nvars);
            return Some(a);
        }
        let t = lp.add_var("__strict_margin", VarBound::NonNegative);
        for atom in &strict {
            let mut e = atom.expr.clone();
            e.add_term(t, &-Rational::one());
            lp.add_constraint(e, Relation::Ge, atom.rhs.clone());
        }
        lp.add_constraint(LinExpr::var(t), Relation::Le, Rational::one());
        lp.set_objective(LinExpr::var(t), Sense::Maximize);
        match solve_lp(&lp) {
            LpOutcome::Optimal {
                mut assignment,
                value,
            } if value.is_positive() => {
                assignment.truncate(nvars);
                Some(assignment)
            }
            LpOutcome::Optimal { value, .. } => {
                debug_assert!(value.is_zero());
                None
            }
            _ => None,
        }
    }
}
