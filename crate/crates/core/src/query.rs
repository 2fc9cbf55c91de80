//! Answers `multi(...)` / `mlessmulti(...)` queries on a model.
//!
//! * only boolean items: does one strategy satisfy all of them (for
//!   `mlessmulti`, a memoryless randomized one)?
//! * one numerical item: its optimum subject to the boolean items;
//! * two numerical items: the Pareto curve subject to the boolean items.
//!
//! `<=` bounds and `min=?` objectives negate the reward structure, so all
//! solving is maximization with lower bounds. Pareto coordinates are kept
//! in that maximization orientation; [`QueryOutcome::summary`] flips the
//! signs back for display.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::graph::{mec_decomposition, MecDecomposition};
use crate::lp::{export_disjunctive, export_lp, ExportOptions};
use crate::mdp::{Model, RewardStructure};
use crate::pareto::{approximate_pareto, ParetoApprox};
use crate::prism::{Query, QueryItem, QueryKind, Spec};
use crate::rational::{fmt_rational, to_decimal, Rational};
use crate::strategy::{extract_memoryless, witness_two_memory, Strategy};
use crate::system::{
    build_memoryless_system, build_system_l, build_weighted_system, check_existence_with,
    check_memoryless_existence_with, optimize_weighted, prune_memoryless, Existence, RewardBound,
    WeightedOutcome,
};

/// `0.7 (7/10)`: six significant digits, then the exact value.
pub fn format_value(r: &Rational) -> String {
    format!("{} ({})", to_decimal(r, 6), fmt_rational(r))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryOutcome {
    Boolean {
        holds: bool,
        /// Witness when `holds`.
        strategy: Option<Strategy>,
    },
    Numerical {
        reward: String,
        /// `None` when the boolean items are unsatisfiable.
        value: Option<Rational>,
        strategy: Option<Strategy>,
    },
    Pareto {
        rewards: [String; 2],
        /// Whether each axis was negated (a `min=?` item).
        negated: [bool; 2],
        approx: ParetoApprox,
    },
}

impl QueryOutcome {
    pub fn strategy(&self) -> Option<&Strategy> {
        match self {
            QueryOutcome::Boolean { strategy, .. } | QueryOutcome::Numerical { strategy, .. } => {
                strategy.as_ref()
            }
            QueryOutcome::Pareto { .. } => None,
        }
    }

    /// Human-readable result; the first line is the verdict.
    pub fn summary(&self) -> String {
        match self {
            QueryOutcome::Boolean { holds, .. } => format!("{holds}\n"),
            QueryOutcome::Numerical { value: Some(v), .. } => format!("{}\n", format_value(v)),
            QueryOutcome::Numerical { value: None, .. } => "infeasible\n".into(),
            QueryOutcome::Pareto {
                rewards,
                negated,
                approx,
            } => {
                if approx.is_empty() {
                    return "infeasible\n".into();
                }
                let mut s = format!(
                    "pareto: {} points, {} weight queries, gap {} (epsilon {})\n",
                    approx.points.len(),
                    approx.queries,
                    fmt_rational(&approx.gap),
                    fmt_rational(&approx.epsilon)
                );
                let orient = |v: &Rational, neg: bool| if neg { -v.clone() } else { v.clone() };
                for p in &approx.points {
                    let _ = writeln!(
                        s,
                        "{}={} {}={}",
                        rewards[0],
                        format_value(&orient(&p.value.0, negated[0])),
                        rewards[1],
                        format_value(&orient(&p.value.1, negated[1]))
                    );
                }
                s
            }
        }
    }
}

fn oriented(model: &Model, item: &QueryItem) -> Result<(RewardStructure, Option<Rational>, bool)> {
    let r = model.reward(&item.reward)?;
    Ok(match &item.spec {
        Spec::Ge(v) => (r.clone(), Some(v.clone()), false),
        Spec::Le(v) => (r.negated(), Some(-v.clone()), true),
        Spec::MaxQ => (r.clone(), None, false),
        Spec::MinQ => (r.negated(), None, true),
    })
}

/// Lower-bound form of the boolean items of `query`.
pub fn boolean_bounds(model: &Model, query: &Query) -> Result<Vec<RewardBound>> {
    query
        .boolean()
        .map(|item| {
            let (r, v, _) = oriented(model, item)?;
            Ok(RewardBound::new(r, v.expect("boolean item has a threshold")))
        })
        .collect()
}

pub fn evaluate(model: &Model, query: &Query, epsilon: &Rational) -> Result<QueryOutcome> {
    let mecs = mec_decomposition(&model.mdp);
    evaluate_with(model, query, epsilon, &mecs)
}

pub fn evaluate_with(
    model: &Model,
    query: &Query,
    epsilon: &Rational,
    mecs: &MecDecomposition,
) -> Result<QueryOutcome> {
    let mdp = &model.mdp;
    let bounds = boolean_bounds(model, query)?;
    let numerical: Vec<&QueryItem> = query.numerical().collect();
    match (query.kind, numerical.as_slice()) {
        (QueryKind::MlessMulti, []) => Ok(match check_memoryless_existence_with(mdp, &bounds, mecs, true)? {
            Existence::Yes(sol) => QueryOutcome::Boolean {
                holds: true,
                strategy: Some(Strategy::Memoryless(extract_memoryless(mdp, &sol))),
            },
            Existence::No => QueryOutcome::Boolean {
                holds: false,
                strategy: None,
            },
        }),
        (QueryKind::MlessMulti, _) => Err(Error::Property(
            "numerical items are not allowed in mlessmulti".into(),
        )),
        (QueryKind::Multi, []) => Ok(match check_existence_with(mdp, &bounds, mecs)? {
            Existence::Yes(sol) => QueryOutcome::Boolean {
                holds: true,
                strategy: Some(Strategy::TwoMemory(witness_two_memory(mdp, &sol, mecs)?)),
            },
            Existence::No => QueryOutcome::Boolean {
                holds: false,
                strategy: None,
            },
        }),
        (QueryKind::Multi, [item]) => {
            let (r, _, negated) = oriented(model, item)?;
            let outcome = optimize_weighted(mdp, &[(r, Rational::from_integer(1.into()))], &bounds, mecs)?;
            Ok(match outcome {
                WeightedOutcome::Optimal { value, solution, .. } => QueryOutcome::Numerical {
                    reward: item.reward.clone(),
                    value: Some(if negated { -value } else { value }),
                    strategy: Some(Strategy::TwoMemory(witness_two_memory(mdp, &solution, mecs)?)),
                },
                WeightedOutcome::Infeasible => QueryOutcome::Numerical {
                    reward: item.reward.clone(),
                    value: None,
                    strategy: None,
                },
            })
        }
        (QueryKind::Multi, [a, b]) => {
            let (ra, _, na) = oriented(model, a)?;
            let (rb, _, nb) = oriented(model, b)?;
            let approx = approximate_pareto(mdp, &ra, &rb, &bounds, epsilon, mecs)?;
            Ok(QueryOutcome::Pareto {
                rewards: [a.reward.clone(), b.reward.clone()],
                negated: [na, nb],
                approx,
            })
        }
        (QueryKind::Multi, _) => Err(Error::Property("at most two numerical items are allowed".into())),
    }
}

/// The program solved for `query`, in CPLEX LP format: the linear system
/// for `multi` (with the numerical item as objective, if any) or the
/// memoryless system as a MILP for `mlessmulti`.
pub fn export_query(model: &Model, query: &Query, opts: &ExportOptions) -> Result<String> {
    let mdp = &model.mdp;
    let mecs = mec_decomposition(mdp);
    let bounds = boolean_bounds(model, query)?;
    let numerical: Vec<&QueryItem> = query.numerical().collect();
    match (query.kind, numerical.as_slice()) {
        (QueryKind::MlessMulti, _) => {
            let mut sys = build_memoryless_system(mdp, &bounds, &mecs);
            prune_memoryless(&mut sys, &mecs);
            export_disjunctive(&sys.dp, opts)
        }
        (QueryKind::Multi, []) => Ok(export_lp(&build_system_l(mdp, &bounds, &mecs)?.lp)),
        (QueryKind::Multi, [item]) => {
            let (r, _, _) = oriented(model, item)?;
            let sys = build_weighted_system(mdp, &[(r, Rational::from_integer(1.into()))], &bounds, &mecs)?;
            Ok(export_lp(&sys.lp))
        }
        (QueryKind::Multi, _) => Err(Error::Export(
            "a query with two numerical items is a sequence of LPs; export one weighted item at a time"
                .into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::prism::parse_property;
    use crate::rational::{int, rat};
    use crate::strategy::{expected_mean_payoffs, product_chain};

    fn eval(model: &Model, prop: &str) -> QueryOutcome {
        evaluate(model, &parse_property(prop).unwrap(), &rat(1, 100)).unwrap()
    }

    #[test]
    fn m2_boolean_queries() {
        let m2 = fixtures::m2();
        let out = eval(&m2, "multi(R{'r1'}>=0.5 [S], R{'r2'}>=0.5 [S])");
        assert_eq!(out.summary(), "true\n");
        let st = out.strategy().unwrap();
        let chain = product_chain(&m2.mdp, st).chain;
        assert_eq!(
            expected_mean_payoffs(&chain, &m2.rewards).unwrap(),
            vec![rat(1, 2), rat(1, 2)]
        );
        assert_eq!(
            eval(&m2, "mlessmulti(R{'r1'}>=0.5 [S], R{'r2'}>=0.5 [S])").summary(),
            "false\n"
        );
        assert_eq!(
            eval(&m2, "mlessmulti(R{'r1'}>=1 [S], R{'r2'}>=0 [S])").summary(),
            "true\n"
        );
    }

    #[test]
    fn m1_constrained_optimum() {
        let out = eval(&fixtures::m1(), "multi(R{'r1'}max=? [S], R{'r2'}>=0.3 [S])");
        assert_eq!(out.summary(), "0.7 (7/10)\n");
        let out = eval(&fixtures::m1(), "multi(R{'r1'}min=? [S], R{'r2'}<=0.3 [S])");
        assert_eq!(out.summary(), "0.7 (7/10)\n");
        let out = eval(&fixtures::m1(), "multi(R{'r1'}max=? [S], R{'r2'}>=2 [S])");
        assert_eq!(out.summary(), "infeasible\n");
    }

    #[test]
    fn pareto_query_and_unknown_reward() {
        let out = eval(&fixtures::m1(), "multi(R{'r1'}max=? [S], R{'r2'}max=? [S])");
        assert!(
            out.summary()
                .starts_with("pareto: 2 points, 3 weight queries, gap 0"),
            "{}",
            out.summary()
        );
        let out = eval(&fixtures::m1(), "multi(R{'r1'}min=? [S], R{'r2'}max=? [S])");
        // minimizing r1 while maximizing r2 has the single optimum (0, 1)
        match &out {
            QueryOutcome::Pareto { approx, .. } => assert_eq!(approx.points.len(), 1),
            other => panic!("{other:?}"),
        }
        assert!(out.summary().contains("r1=0 (0) r2=1 (1)"), "{}", out.summary());
        let q = parse_property("multi(R{'nope'}>=1 [S])").unwrap();
        assert!(matches!(
            evaluate(&fixtures::m1(), &q, &int(1)),
            Err(Error::UnknownReward(_))
        ));
    }

    #[test]
    fn lp_export() {
        let m2 = fixtures::m2();
        let opts = ExportOptions::default();
        let q = parse_property("multi(R{'r1'}>=0.5 [S], R{'r2'}>=0.5 [S])").unwrap();
        let text = export_query(&m2, &q, &opts).unwrap();
        assert!(text.contains("reward_1:") && text.ends_with("End\n"), "{text}");
        let q = parse_property("multi(R{'r1'}max=? [S])").unwrap();
        assert!(export_query(&m2, &q, &opts).unwrap().contains("\nMaximize\n"));
        let q = parse_property("mlessmulti(R{'r1'}>=0.5 [S])").unwrap();
        assert!(matches!(export_query(&m2, &q, &opts), Err(Error::Export(_))));
        let opts = ExportOptions {
            big_m: Some(int(10)),
            strict_epsilon: Some(rat(1, 1000)),
        };
        assert!(export_query(&m2, &q, &opts).unwrap().contains("Binary"));
    }
}
