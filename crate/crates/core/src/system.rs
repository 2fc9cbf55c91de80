//! The flow/frequency linear system characterizing achievable mean-payoff
//! vectors, and its memoryless strengthening.
//!
//! Variables, all non-negative:
//!
//! * `y_a` for every action: expected number of times `a` is taken before
//!   the run commits to its recurrent behaviour;
//! * `y_s` for every state: probability of committing at `s`;
//! * `x_a` for every action: long-run frequency of `a`.
//!
//! Rows:
//!
//! 1. flow, per state `s`:
//!    `[s = s0] + sum_a y_a * P(a)(s) = sum_{a in Act(s)} y_a + y_s`
//! 2. commitment: `sum_{s in S_MEC} y_s = 1`
//! 3. per MEC `C`: `sum_{s in C} y_s = sum_{a in C} x_a`
//! 4. recurrent flow, per state `s`: `sum_a x_a * P(a)(s) = sum_{a in Act(s)} x_a`
//! 5. per reward `r_i`: `sum_a x_a * r_i(a) >= v_i`

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{mec_decomposition, MecDecomposition};
use crate::lp::{
    solve_disjunctive, solve_lp, Atom, AtomRelation, Clause, DisjunctiveProgram, LinExpr, LinearProgram,
    LpOutcome, Relation, Sense, VarBound, VarId,
};
use crate::mdp::{ActionId, Mdp, RewardStructure, StateId};
use crate::rational::Rational;

/// A lower bound `E[mp(reward)] >= threshold`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewardBound {
    pub reward: RewardStructure,
    pub threshold: Rational,
}

impl RewardBound {
    pub fn new(reward: RewardStructure, threshold: Rational) -> Self {
        Self { reward, threshold }
    }
}

/// Variable indices of the system inside its [`LinearProgram`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowVars {
    pub ya: Vec<VarId>,
    pub ys: Vec<VarId>,
    pub xa: Vec<VarId>,
}

#[derive(Debug, Clone)]
pub struct SystemL {
    pub lp: LinearProgram,
    pub vars: FlowVars,
}

/// Values of `y_a`, `y_s` and `x_a`, indexed by action / state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemLSolution {
    pub ya: Vec<Rational>,
    pub ys: Vec<Rational>,
    pub xa: Vec<Rational>,
}

impl SystemLSolution {
    pub fn from_assignment(vars: &FlowVars, assignment: &[Rational]) -> Self {
        let pick = |ids: &[VarId]| ids.iter().map(|&v| assignment[v].clone()).collect();
        Self {
            ya: pick(&vars.ya),
            ys: pick(&vars.ys),
            xa: pick(&vars.xa),
        }
    }

    /// Long-run value `sum_a x_a r(a)`.
    pub fn value(&self, reward: &RewardStructure) -> Rational {
        reward
            .entries()
            .map(|(a, r)| r * &self.xa[a])
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    /// `sum_{a in Act(s)} x_a`.
    pub fn state_frequency(&self, mdp: &Mdp, s: StateId) -> Rational {
        mdp.enabled(s).iter().map(|&a| self.xa[a].clone()).sum()
    }

    pub fn to_assignment(&self, vars: &FlowVars, nvars: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); nvars];
        for (ids, vals) in [(&vars.ya, &self.ya), (&vars.ys, &self.ys), (&vars.xa, &self.xa)] {
            for (&v, x) in ids.iter().zip(vals) {
                out[v] = x.clone();
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Existence {
    Yes(SystemLSolution),
    No,
}

impl Existence {
    pub fn is_yes(&self) -> bool {
        matches!(self, Existence::Yes(_))
    }
}

pub(crate) fn add_y_vars(lp: &mut LinearProgram, mdp: &Mdp) -> (Vec<VarId>, Vec<VarId>) {
    let ya = (0..mdp.num_actions())
        .map(|a| lp.add_var(format!("ya_{a}"), VarBound::NonNegative))
        .collect();
    let ys = (0..mdp.num_states())
        .map(|s| lp.add_var(format!("ys_{s}"), VarBound::NonNegative))
        .collect();
    (ya, ys)
}

/// Row family 1, one row per state.
pub(crate) fn add_flow_rows(lp: &mut LinearProgram, mdp: &Mdp, ya: &[VarId], ys: &[VarId]) {
    let mut rows: Vec<LinExpr> = (0..mdp.num_states())
        .map(|s| {
            let mut e = LinExpr::var(ys[s]);
            for &a in mdp.enabled(s) {
                e.add_term(ya[a], &Rational::one());
            }
            e
        })
        .collect();
    for (a, act) in mdp.actions().iter().enumerate() {
        for (t, p) in &act.successors {
            rows[*t].add_term(ya[a], &-p);
        }
    }
    for (s, e) in rows.into_iter().enumerate() {
        let rhs = if s == mdp.initial() {
            Rational::one()
        } else {
            Rational::zero()
        };
        lp.add_labeled(format!("flow_{s}"), e, Relation::Eq, rhs);
    }
}

fn add_recurrent_rows(lp: &mut LinearProgram, mdp: &Mdp, xa: &[VarId]) {
    let mut rows: Vec<LinExpr> = (0..mdp.num_states())
        .map(|s| mdp.enabled(s).iter().map(|&a| (xa[a], Rational::one())).collect())
        .collect();
    for (a, act) in mdp.actions().iter().enumerate() {
        for (t, p) in &act.successors {
            rows[*t].add_term(xa[a], &-p);
        }
    }
    for (s, e) in rows.into_iter().enumerate() {
        lp.add_labeled(format!("recurrent_{s}"), e, Relation::Eq, Rational::zero());
    }
}

fn reward_expr(reward: &RewardStructure, xa: &[VarId]) -> LinExpr {
    reward.entries().map(|(a, r)| (xa[a], r.clone())).collect()
}

/// Which rows of family 3 to emit: per-MEC sums, or the memoryless
/// per-state pinning `y_s = sum_{a in Act(s)} x_a`.
enum Commitment {
    PerMec,
    PerState,
}

fn build(mdp: &Mdp, bounds: &[RewardBound], mecs: &MecDecomposition, commitment: Commitment) -> SystemL {
    let mut lp = LinearProgram::new();
    let (ya, ys) = add_y_vars(&mut lp, mdp);
    let xa: Vec<VarId> = (0..mdp.num_actions())
        .map(|a| lp.add_var(format!("xa_{a}"), VarBound::NonNegative))
        .collect();

    add_flow_rows(&mut lp, mdp, &ya, &ys);

    let commit: LinExpr = mecs
        .mec_states()
        .into_iter()
        .map(|s| (ys[s], Rational::one()))
        .collect();
    lp.add_labeled("commit", commit, Relation::Eq, Rational::one());

    match commitment {
        Commitment::PerMec => {
            for (k, mec) in mecs.mecs.iter().enumerate() {
                let mut e: LinExpr = mec.states.iter().map(|&s| (ys[s], Rational::one())).collect();
                for &a in &mec.actions {
                    e.add_term(xa[a], &-Rational::one());
                }
                lp.add_labeled(format!("mec_{k}"), e, Relation::Eq, Rational::zero());
            }
        }
        Commitment::PerState => {}
    }

    add_recurrent_rows(&mut lp, mdp, &xa);

    if let Commitment::PerState = commitment {
        for s in 0..mdp.num_states() {
            let mut e = LinExpr::var(ys[s]);
            for &a in mdp.enabled(s) {
                e.add_term(xa[a], &-Rational::one());
            }
            lp.add_labeled(format!("pin_{s}"), e, Relation::Eq, Rational::zero());
        }
    }

    for (i, b) in bounds.iter().enumerate() {
        lp.add_labeled(
            format!("reward_{i}"),
            reward_expr(&b.reward, &xa),
            Relation::Ge,
            b.threshold.clone(),
        );
    }
    SystemL {
        lp,
        vars: FlowVars { ya, ys, xa },
    }
}

/// Instantiates the system for the given reward bounds.
pub fn build_system_l(mdp: &Mdp, bounds: &[RewardBound], mecs: &MecDecomposition) -> Result<SystemL> {
    if bounds.is_empty() {
        return Err(Error::Precondition(
            "at least one reward bound is required".into(),
        ));
    }
    Ok(build(mdp, bounds, mecs, Commitment::PerMec))
}

/// Whether some strategy achieves every bound, with a solution witnessing it.
pub fn check_existence(mdp: &Mdp, bounds: &[RewardBound]) -> Result<Existence> {
    check_existence_with(mdp, bounds, &mec_decomposition(mdp))
}

pub fn check_existence_with(mdp: &Mdp, bounds: &[RewardBound], mecs: &MecDecomposition) -> Result<Existence> {
    let sys = build_system_l(mdp, bounds, mecs)?;
    Ok(match solve_lp(&sys.lp) {
        LpOutcome::Feasible(a) => Existence::Yes(SystemLSolution::from_assignment(&sys.vars, &a)),
        LpOutcome::Infeasible => Existence::No,
        other => return Err(Error::Internal(format!("feasibility LP returned {other:?}"))),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightedOutcome {
    Optimal {
        /// Optimal weighted sum.
        value: Rational,
        /// Achieved value of each objective, in input order.
        objective_values: Vec<Rational>,
        solution: SystemLSolution,
    },
    Infeasible,
}

/// The system with the constraint bounds and the objective
/// `maximize sum_j w_j * sum_a x_a r_j(a)`.
pub fn build_weighted_system(
    mdp: &Mdp,
    objectives: &[(RewardStructure, Rational)],
    constraints: &[RewardBound],
    mecs: &MecDecomposition,
) -> Result<SystemL> {
    if objectives.is_empty() {
        return Err(Error::Precondition("no objective".into()));
    }
    if objectives.iter().any(|(_, w)| w.is_negative()) || objectives.iter().all(|(_, w)| w.is_zero()) {
        return Err(Error::Precondition(
            "weights must be non-negative and not all zero".into(),
        ));
    }
    let mut sys = build(mdp, constraints, mecs, Commitment::PerMec);
    let mut obj = LinExpr::new();
    for (r, w) in objectives {
        obj.add_expr(&reward_expr(r, &sys.vars.xa), w);
    }
    sys.lp.set_objective(obj, Sense::Maximize);
    Ok(sys)
}

/// Maximizes `sum_j w_j * E[mp(r_j)]` subject to the constraint bounds.
pub fn optimize_weighted(
    mdp: &Mdp,
    objectives: &[(RewardStructure, Rational)],
    constraints: &[RewardBound],
    mecs: &MecDecomposition,
) -> Result<WeightedOutcome> {
    let sys = build_weighted_system(mdp, objectives, constraints, mecs)?;
    match solve_lp(&sys.lp) {
        LpOutcome::Optimal { assignment, value } => {
            let solution = SystemLSolution::from_assignment(&sys.vars, &assignment);
            let objective_values = objectives.iter().map(|(r, _)| solution.value(r)).collect();
            Ok(WeightedOutcome::Optimal {
                value,
                objective_values,
                solution,
            })
        }
        LpOutcome::Infeasible => Ok(WeightedOutcome::Infeasible),
        other => Err(Error::Internal(format!("weighted LP returned {other:?}"))),
    }
}

/// The memoryless system as a disjunctive program.
#[derive(Debug, Clone)]
pub struct MemorylessSystem {
    pub dp: DisjunctiveProgram,
    pub vars: FlowVars,
}

/// Base rows 1, 2, 4, 5 plus `y_s = sum_{a in Act(s)} x_a` for every state,
/// and one clause per action `b`:
/// `y_b = 0  or  x_b > 0  or  sum_{a in Act(src(b))} x_a = 0`.
///
/// The `x` atoms carry big-M 1 for export since frequencies never exceed
/// one; `y_b = 0` needs a caller-supplied M.
pub fn build_memoryless_system(
    mdp: &Mdp,
    bounds: &[RewardBound],
    mecs: &MecDecomposition,
) -> MemorylessSystem {
    let sys = build(mdp, bounds, mecs, Commitment::PerState);
    let vars = sys.vars;
    let clauses = (0..mdp.num_actions())
        .map(|b| {
            let src = mdp.source(b);
            let src_freq: LinExpr = mdp
                .enabled(src)
                .iter()
                .map(|&a| (vars.xa[a], Rational::one()))
                .collect();
            let mut no_transient = Atom::new(LinExpr::var(vars.ya[b]), AtomRelation::Eq, Rational::zero());
            no_transient.big_m = None;
            let mut recurrent = Atom::new(LinExpr::var(vars.xa[b]), AtomRelation::Gt, Rational::zero());
            recurrent.big_m = Some(Rational::one());
            let mut transient_state = Atom::new(src_freq, AtomRelation::Eq, Rational::zero());
            transient_state.big_m = Some(Rational::one());
            Clause {
                disjuncts: vec![vec![no_transient], vec![recurrent], vec![transient_state]],
            }
        })
        .collect();
    MemorylessSystem {
        dp: DisjunctiveProgram {
            base: sys.lp,
            clauses,
        },
        vars,
    }
}

/// Removes `x_b > 0` disjuncts for actions outside every MEC: the base rows
/// force such frequencies to zero.
pub fn prune_memoryless(sys: &mut MemorylessSystem, mecs: &MecDecomposition) {
    for (b, clause) in sys.dp.clauses.iter_mut().enumerate() {
        if !mecs.action_in_mec(b as ActionId) {
            clause.disjuncts.retain(|d| !(d.len() == 1 && d[0].is_strict()));
        }
    }
}

/// Existence restricted to memoryless randomized strategies.
pub fn check_memoryless_existence(mdp: &Mdp, bounds: &[RewardBound]) -> Result<Existence> {
    check_memoryless_existence_with(mdp, bounds, &mec_decomposition(mdp), true)
}

pub fn check_memoryless_existence_with(
    mdp: &Mdp,
    bounds: &[RewardBound],
    mecs: &MecDecomposition,
    prune: bool,
) -> Result<Existence> {
    let mut sys = build_memoryless_system(mdp, bounds, mecs);
    if prune {
        prune_memoryless(&mut sys, mecs);
    }
    Ok(match solve_disjunctive(&sys.dp) {
        LpOutcome::Feasible(a) => Existence::Yes(SystemLSolution::from_assignment(&sys.vars, &a)),
        LpOutcome::Infeasible => Existence::No,
        other => return Err(Error::Internal(format!("disjunctive solve returned {other:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mdp::Model;
    use crate::rational::{int, rat};

    fn bounds(model: &Model, v: &[Rational]) -> Vec<RewardBound> {
        model
            .rewards
            .iter()
            .zip(v)
            .map(|(r, t)| RewardBound::new(r.clone(), t.clone()))
            .collect()
    }

    fn half() -> Vec<Rational> {
        vec![rat(1, 2), rat(1, 2)]
    }

    #[test]
    fn m2_system_shape() {
        let m = fixtures::m2();
        let mecs = mec_decomposition(&m.mdp);
        let sys = build_system_l(&m.mdp, &bounds(&m, &half()), &mecs).unwrap();
        assert_eq!(sys.lp.num_vars(), 8);
        assert_eq!(sys.lp.constraints.len(), 2 + 1 + 2 + 2 + 2);
        // flow row at s0 reduces to y_go + y_s0 = 1
        let flow0 = &sys.lp.constraints[0];
        let expected: LinExpr = [(sys.vars.ya[1], int(1)), (sys.vars.ys[0], int(1))]
            .into_iter()
            .collect();
        assert_eq!(flow0.expr, expected);
        assert_eq!(flow0.rhs, int(1));
    }

    #[test]
    fn m1_system_rows() {
        let m = fixtures::m1();
        let mecs = mec_decomposition(&m.mdp);
        let sys = build_system_l(&m.mdp, &bounds(&m, &half()), &mecs).unwrap();
        assert_eq!(sys.lp.constraints.len(), 6);
        // recurrent row x_a + x_b = x_a + x_b cancels completely
        let rec = sys
            .lp
            .constraints
            .iter()
            .find(|c| c.label.as_deref() == Some("recurrent_0"))
            .unwrap();
        assert!(rec.expr.is_empty());
        let r0 = sys
            .lp
            .constraints
            .iter()
            .find(|c| c.label.as_deref() == Some("reward_0"))
            .unwrap();
        assert_eq!(r0.expr, LinExpr::var(sys.vars.xa[0]));
        assert_eq!(r0.rhs, rat(1, 2));
    }

    #[test]
    fn empty_bounds_violate_precondition() {
        let m = fixtures::m1();
        let mecs = mec_decomposition(&m.mdp);
        assert!(matches!(
            build_system_l(&m.mdp, &[], &mecs),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn existence_examples() {
        let m1 = fixtures::m1();
        match check_existence(&m1.mdp, &bounds(&m1, &half())).unwrap() {
            Existence::Yes(sol) => assert_eq!(sol.xa, half()),
            Existence::No => panic!("M1 at (1/2,1/2) must be achievable"),
        }
        assert_eq!(
            check_existence(&m1.mdp, &bounds(&m1, &[rat(3, 5), rat(1, 2)])).unwrap(),
            Existence::No
        );

        let m2 = fixtures::m2();
        match check_existence(&m2.mdp, &bounds(&m2, &half())).unwrap() {
            Existence::Yes(sol) => {
                assert_eq!(sol.xa, vec![rat(1, 2), int(0), rat(1, 2)]);
                assert_eq!(sol.ya[1], rat(1, 2));
                assert_eq!(sol.ys, half());
            }
            Existence::No => panic!("M2 at (1/2,1/2) must be achievable"),
        }
    }

    #[test]
    fn weighted_examples() {
        let m1 = fixtures::m1();
        let mecs = mec_decomposition(&m1.mdp);
        let r1 = m1.rewards[0].clone();
        let r2 = m1.rewards[1].clone();
        let opt = |objs: &[(RewardStructure, Rational)], cons: &[RewardBound]| match optimize_weighted(
            &m1.mdp, objs, cons, &mecs,
        )
        .unwrap()
        {
            WeightedOutcome::Optimal { value, .. } => value,
            WeightedOutcome::Infeasible => panic!("infeasible"),
        };
        assert_eq!(opt(&[(r1.clone(), int(1))], &[]), int(1));
        assert_eq!(
            opt(
                &[(r1.clone(), int(1))],
                &[RewardBound::new(r2.clone(), rat(3, 10))]
            ),
            rat(7, 10)
        );
        assert_eq!(
            optimize_weighted(
                &m1.mdp,
                &[(r1.clone(), int(1))],
                &[RewardBound::new(r2, int(2))],
                &mecs
            )
            .unwrap(),
            WeightedOutcome::Infeasible
        );
        assert!(optimize_weighted(&m1.mdp, &[(r1, int(0))], &[], &mecs).is_err());

        let m2 = fixtures::m2();
        let mecs2 = mec_decomposition(&m2.mdp);
        let objs = [(m2.rewards[0].clone(), int(1)), (m2.rewards[1].clone(), int(1))];
        match optimize_weighted(&m2.mdp, &objs, &[], &mecs2).unwrap() {
            WeightedOutcome::Optimal {
                value,
                objective_values,
                ..
            } => {
                assert_eq!(value, int(1));
                assert_eq!(&objective_values[0] + &objective_values[1], int(1));
            }
            WeightedOutcome::Infeasible => panic!(),
        }
    }

    #[test]
    fn memoryless_system_shape() {
        let m2 = fixtures::m2();
        let mecs = mec_decomposition(&m2.mdp);
        let sys = build_memoryless_system(&m2.mdp, &bounds(&m2, &half()), &mecs);
        assert_eq!(sys.dp.clauses.len(), m2.mdp.num_actions());
        let pin0 = sys
            .dp
            .base
            .constraints
            .iter()
            .find(|c| c.label.as_deref() == Some("pin_0"))
            .unwrap();
        let expected: LinExpr = [
            (sys.vars.ys[0], int(1)),
            (sys.vars.xa[0], int(-1)),
            (sys.vars.xa[1], int(-1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(pin0.expr, expected);
        assert!(sys.dp.base.constraints.iter().all(|c| !c
            .label
            .as_deref()
            .unwrap_or("")
            .starts_with("mec_")));
        // 2 flow + commit + 2 recurrent + 2 pins + 2 rewards
        assert_eq!(sys.dp.base.constraints.len(), 9);

        let mut pruned = sys.clone();
        prune_memoryless(&mut pruned, &mecs);
        assert_eq!(pruned.dp.clauses[1].disjuncts.len(), 2);
        assert_eq!(pruned.dp.clauses[0].disjuncts.len(), 3);
    }

    #[test]
    fn memoryless_examples() {
        let m1 = fixtures::m1();
        assert!(check_memoryless_existence(&m1.mdp, &bounds(&m1, &half()))
            .unwrap()
            .is_yes());

        let m2 = fixtures::m2();
        assert_eq!(
            check_memoryless_existence(&m2.mdp, &bounds(&m2, &half())).unwrap(),
            Existence::No
        );
        assert!(
            check_memoryless_existence(&m2.mdp, &bounds(&m2, &[int(0), int(1)]))
                .unwrap()
                .is_yes()
        );
        assert!(
            check_memoryless_existence(&m2.mdp, &bounds(&m2, &[int(1), int(0)]))
                .unwrap()
                .is_yes()
        );
        let mecs = mec_decomposition(&m2.mdp);
        assert_eq!(
            check_memoryless_existence_with(&m2.mdp, &bounds(&m2, &half()), &mecs, false).unwrap(),
            Existence::No
        );
    }
}
