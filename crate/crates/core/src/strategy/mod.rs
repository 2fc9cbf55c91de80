//! Witness strategies, their product Markov chains, exact verification and
//! simulation.

mod json;
mod product;
mod simulate;

pub use json::{strategy_from_json, strategy_to_json};
pub use product::{expected_mean_payoffs, product_chain, Mode, ProductChain};
pub use simulate::{sample_index, simulate, TraceStep};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::MecDecomposition;
use crate::lp::{solve_lp, LinExpr, LinearProgram, LpOutcome, Relation, VarId};
use crate::mdp::{ActionId, Mdp, StateId};
use crate::rational::{int, Rational};
use crate::system::{add_flow_rows, add_y_vars, SystemLSolution};

/// A distribution over the actions enabled in one state: positive entries
/// only, ascending by action.
pub type Distribution = Vec<(ActionId, Rational)>;

/// Randomized strategy with a transient and a recurrent memory element.
///
/// Play starts in transient mode. Whenever a state `s` is entered in
/// transient mode (including the initial state), the strategy moves to
/// recurrent mode with probability `switch[s]`; recurrent mode is never
/// left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoMemoryStrategy {
    pub transient: Vec<Distribution>,
    /// `None` where the recurrent frequencies vanish; such states are never
    /// reached in recurrent mode.
    pub recurrent: Vec<Option<Distribution>>,
    pub switch: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemorylessStrategy {
    pub choice: Vec<Distribution>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    TwoMemory(TwoMemoryStrategy),
    Memoryless(MemorylessStrategy),
}

impl Strategy {
    pub fn validate(&self, mdp: &Mdp) -> Vec<String> {
        let mut out = Vec::new();
        let n = mdp.num_states();
        let mut check = |what: &str, dists: &[Option<&Distribution>]| {
            if dists.len() != n {
                out.push(format!("{what}: {} entries for {n} states", dists.len()));
                return;
            }
            for (s, d) in dists.iter().enumerate() {
                if let Some(d) = d {
                    check_distribution(mdp, s, d, what, &mut out);
                }
            }
        };
        match self {
            Strategy::Memoryless(m) => {
                check("choice", &m.choice.iter().map(Some).collect::<Vec<_>>());
            }
            Strategy::TwoMemory(t) => {
                check("transient", &t.transient.iter().map(Some).collect::<Vec<_>>());
                check(
                    "recurrent",
                    &t.recurrent.iter().map(Option::as_ref).collect::<Vec<_>>(),
                );
                for (s, p) in t.switch.iter().enumerate() {
                    if p.is_negative() || *p > Rational::one() {
                        out.push(format!("switch at {}: {p} outside [0,1]", mdp.state_name(s)));
                    }
                }
                if t.switch.len() != n {
                    out.push(format!("switch: {} entries for {n} states", t.switch.len()));
                }
            }
        }
        out
    }
}

fn check_distribution(mdp: &Mdp, s: StateId, d: &Distribution, what: &str, out: &mut Vec<String>) {
    let name = mdp.state_name(s);
    let mut total = Rational::zero();
    for (a, p) in d {
        if !mdp.enabled(s).contains(a) {
            out.push(format!("{what} at {name}: action {a} not enabled"));
        }
        if !p.is_positive() {
            out.push(format!("{what} at {name}: probability {p} not positive"));
        }
        total += p;
    }
    if !total.is_one() {
        out.push(format!("{what} at {name}: sums to {total}"));
    }
}

/// Normalizes `weights` (indexed by action) over `Act(s)`; `None` when they
/// sum to zero there.
pub fn proportional(mdp: &Mdp, s: StateId, weights: &[Rational]) -> Option<Distribution> {
    let total: Rational = mdp.enabled(s).iter().map(|&a| weights[a].clone()).sum();
    if total.is_zero() {
        return None;
    }
    let mut d: Distribution = mdp
        .enabled(s)
        .iter()
        .filter(|&&a| weights[a].is_positive())
        .map(|&a| (a, &weights[a] / &total))
        .collect();
    d.sort_by_key(|(a, _)| *a);
    Some(d)
}

pub fn uniform(mdp: &Mdp, s: StateId) -> Distribution {
    let acts = mdp.enabled(s);
    let p = Rational::one() / int(acts.len() as i64);
    let mut d: Distribution = acts.iter().map(|&a| (a, p.clone())).collect();
    d.sort_by_key(|(a, _)| *a);
    d
}

/// The LP fixing how transient mass is handed over to recurrent play.
#[derive(Debug, Clone)]
pub struct SwitchingLp {
    pub lp: LinearProgram,
    pub ya: Vec<VarId>,
    pub ys: Vec<VarId>,
}

/// Flow rows over `y_a, y_s` together with `y_s = sum_{a in Act(s)} xbar_a`
/// for every MEC state.
pub fn build_switching_lp(mdp: &Mdp, xbar: &[Rational], mecs: &MecDecomposition) -> SwitchingLp {
    let mut lp = LinearProgram::new();
    let (ya, ys) = add_y_vars(&mut lp, mdp);
    add_flow_rows(&mut lp, mdp, &ya, &ys);
    for s in mecs.mec_states() {
        let freq: Rational = mdp.enabled(s).iter().map(|&a| xbar[a].clone()).sum();
        lp.add_labeled(format!("pin_{s}"), LinExpr::var(ys[s]), Relation::Eq, freq);
    }
    SwitchingLp { lp, ya, ys }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchingSolution {
    pub ya: Vec<Rational>,
    pub ys: Vec<Rational>,
}

pub fn solve_switching(mdp: &Mdp, xbar: &[Rational], mecs: &MecDecomposition) -> Result<SwitchingSolution> {
    let sw = build_switching_lp(mdp, xbar, mecs);
    match solve_lp(&sw.lp) {
        LpOutcome::Feasible(a) => Ok(SwitchingSolution {
            ya: sw.ya.iter().map(|&v| a[v].clone()).collect(),
            ys: sw.ys.iter().map(|&v| a[v].clone()).collect(),
        }),
        other => Err(Error::Internal(format!(
            "switching LP for a feasible system returned {other:?}"
        ))),
    }
}

/// Two-memory witness from a solution of the flow system and of the
/// switching LP:
///
/// * transient `sigma_t(s)(a) = y_a / sum_{b in Act(s)} y_b`
/// * recurrent `sigma_r(s)(a) = x_a / sum_{b in Act(s)} x_b`
/// * `switch(s) = y_s / (sum_{a in Act(s)} y_a + y_s)`
///
/// where `y` comes from the switching solution. When the transient
/// denominator vanishes `sigma_t(s)` is uniform; when `y_s` vanishes too
/// the switch probability is 0. Such states carry no transient mass.
pub fn synthesize_two_memory(
    mdp: &Mdp,
    solution: &SystemLSolution,
    switching: &SwitchingSolution,
) -> TwoMemoryStrategy {
    let n = mdp.num_states();
    let mut transient = Vec::with_capacity(n);
    let mut recurrent = Vec::with_capacity(n);
    let mut switch = Vec::with_capacity(n);
    for s in 0..n {
        transient.push(proportional(mdp, s, &switching.ya).unwrap_or_else(|| uniform(mdp, s)));
        recurrent.push(proportional(mdp, s, &solution.xa));
        let out: Rational = mdp.enabled(s).iter().map(|&a| switching.ya[a].clone()).sum();
        let denom = out + &switching.ys[s];
        switch.push(if denom.is_zero() {
            Rational::zero()
        } else {
            &switching.ys[s] / denom
        });
    }
    TwoMemoryStrategy {
        transient,
        recurrent,
        switch,
    }
}

/// Solves the switching LP for `solution` and builds the witness.
pub fn witness_two_memory(
    mdp: &Mdp,
    solution: &SystemLSolution,
    mecs: &MecDecomposition,
) -> Result<TwoMemoryStrategy> {
    let sw = solve_switching(mdp, &solution.xa, mecs)?;
    Ok(synthesize_two_memory(mdp, solution, &sw))
}

/// Memoryless witness from a solution of the memoryless system: play the
/// recurrent frequencies where they are positive, otherwise the transient
/// flow, otherwise uniformly.
pub fn extract_memoryless(mdp: &Mdp, solution: &SystemLSolution) -> MemorylessStrategy {
    MemorylessStrategy {
        choice: (0..mdp.num_states())
            .map(|s| {
                proportional(mdp, s, &solution.xa)
                    .or_else(|| proportional(mdp, s, &solution.ya))
                    .unwrap_or_else(|| uniform(mdp, s))
            })
            .collect(),
    }
}
