use num_traits::{One, Signed, Zero};

use super::{ActionId, StateId};
use crate::rational::Rational;

/// One edge of a Markov chain, labelled with the MDP action that produced
/// it so rewards can be read off the action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainTransition {
    pub target: usize,
    pub prob: Rational,
    pub action: ActionId,
}

/// A finite Markov chain induced by an MDP and a strategy.
///
/// Several edges may share a target when different actions lead to the
/// same successor; they are kept apart so each carries its own action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovChain {
    pub state_names: Vec<String>,
    /// The MDP state underlying each chain state.
    pub mdp_state: Vec<StateId>,
    pub transitions: Vec<Vec<ChainTransition>>,
    /// Initial distribution; a single entry for memoryless products.
    pub initial: Vec<(usize, Rational)>,
}

impl MarkovChain {
    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    /// Successor states of `s`, deduplicated, in first-seen order.
    pub fn successors(&self, s: usize) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for t in &self.transitions[s] {
            if !out.contains(&t.target) {
                out.push(t.target);
            }
        }
        out
    }

    /// Aggregated one-step probability matrix as sparse rows.
    pub fn probability_rows(&self) -> Vec<Vec<(usize, Rational)>> {
        self.transitions
            .iter()
            .map(|row| {
                let mut agg: Vec<(usize, Rational)> = Vec::new();
                for t in row {
                    match agg.iter_mut().find(|(s, _)| *s == t.target) {
                        Some((_, p)) => *p += &t.prob,
                        None => agg.push((t.target, t.prob.clone())),
                    }
                }
                agg
            })
            .collect()
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.num_states();
        for (s, row) in self.transitions.iter().enumerate() {
            let mut total = Rational::zero();
            for t in row {
                if t.target >= n {
                    out.push(format!("state {}: bad target {}", self.state_names[s], t.target));
                }
                if !t.prob.is_positive() {
                    out.push(format!(
                        "state {}: probability {} not positive",
                        self.state_names[s], t.prob
                    ));
                }
                total += &t.prob;
            }
            if !total.is_one() {
                out.push(format!("state {}: row sums to {total}", self.state_names[s]));
            }
        }
        let init: Rational = self.initial.iter().map(|(_, p)| p.clone()).sum();
        if !init.is_one() {
            out.push(format!("initial distribution sums to {init}"));
        }
        out
    }
}
