use std::collections::{HashMap, VecDeque};

use num_traits::{One, Zero};

use super::{uniform, Distribution, Strategy};
use crate::error::{Error, Result};
use crate::graph::bsccs;
use crate::linalg::solve_columns;
use crate::mdp::{ChainTransition, MarkovChain, Mdp, RewardStructure, StateId};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Transient,
    Recurrent,
}

impl Mode {
    pub fn letter(self) -> char {
        match self {
            Mode::Transient => 't',
            Mode::Recurrent => 'r',
        }
    }
}

/// A Markov chain induced by a strategy, remembering the memory mode of
/// each chain state (`None` for memoryless strategies).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductChain {
    pub chain: MarkovChain,
    pub modes: Vec<Option<Mode>>,
}

/// The chain induced by `strategy` on `mdp`.
///
/// Memoryless strategies give a chain over all of `S`. Two-memory
/// strategies give a chain over the pairs `(s, mode)` reachable from the
/// initial distribution, named `(s,t)` / `(s,r)` and numbered in
/// breadth-first order. A recurrent-mode state without a recurrent
/// distribution falls back to the uniform one.
pub fn product_chain(mdp: &Mdp, strategy: &Strategy) -> ProductChain {
    match strategy {
        Strategy::Memoryless(m) => {
            let transitions = (0..mdp.num_states()).map(|s| edges(mdp, &m.choice[s])).collect();
            ProductChain {
                chain: MarkovChain {
                    state_names: mdp.state_names().to_vec(),
                    mdp_state: (0..mdp.num_states()).collect(),
                    transitions,
                    initial: vec![(mdp.initial(), Rational::one())],
                },
                modes: vec![None; mdp.num_states()],
            }
        }
        Strategy::TwoMemory(st) => {
            let mut index: HashMap<(StateId, Mode), usize> = HashMap::new();
            let mut states: Vec<(StateId, Mode)> = Vec::new();
            let mut queue = VecDeque::new();
            let mut intern = |key: (StateId, Mode), states: &mut Vec<_>, queue: &mut VecDeque<_>| {
                *index.entry(key).or_insert_with(|| {
                    states.push(key);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                })
            };
            // entering s in transient mode
            let enter = |s: StateId, p: Rational| -> Vec<((StateId, Mode), Rational)> {
                let sw = &st.switch[s];
                let mut out = Vec::new();
                if !sw.is_zero() {
                    out.push(((s, Mode::Recurrent), &p * sw));
                }
                if !sw.is_one() {
                    out.push(((s, Mode::Transient), &p * (Rational::one() - sw)));
                }
                out
            };

            let mut initial = Vec::new();
            for (key, p) in enter(mdp.initial(), Rational::one()) {
                initial.push((intern(key, &mut states, &mut queue), p));
            }
            let mut transitions: Vec<Vec<ChainTransition>> = Vec::new();
            while let Some(i) = queue.pop_front() {
                let (s, mode) = states[i];
                let mut row = Vec::new();
                match mode {
                    Mode::Recurrent => {
                        let fallback;
                        let d = match &st.recurrent[s] {
                            Some(d) => d,
                            None => {
                                fallback = uniform(mdp, s);
                                &fallback
                            }
                        };
                        for e in edges(mdp, d) {
                            let target = intern((e.target, Mode::Recurrent), &mut states, &mut queue);
                            row.push(ChainTransition { target, ..e });
                        }
                    }
                    Mode::Transient => {
                        for e in edges(mdp, &st.transient[s]) {
                            for (key, p) in enter(e.target, e.prob) {
                                let target = intern(key, &mut states, &mut queue);
                                row.push(ChainTransition {
                                    target,
                                    prob: p,
                                    action: e.action,
                                });
                            }
                        }
                    }
                }
                debug_assert_eq!(transitions.len(), i);
                transitions.push(row);
            }
            ProductChain {
                chain: MarkovChain {
                    state_names: states
                        .iter()
                        .map(|&(s, m)| format!("({},{})", mdp.state_name(s), m.letter()))
                        .collect(),
                    mdp_state: states.iter().map(|&(s, _)| s).collect(),
                    transitions,
                    initial,
                },
                modes: states.iter().map(|&(_, m)| Some(m)).collect(),
            }
        }
    }
}

fn edges(mdp: &Mdp, d: &Distribution) -> Vec<ChainTransition> {
    let mut out = Vec::new();
    for (a, pa) in d {
        for (t, pt) in &mdp.action(*a).successors {
            out.push(ChainTransition {
                target: *t,
                prob: pa * pt,
                action: *a,
            });
        }
    }
    out
}

/// Exact expected mean payoff of each reward structure on `chain`.
///
/// Each bottom SCC gets the stationary average of its one-step expected
/// reward; transient states average these by their absorption
/// probabilities; the result is weighted by the initial distribution.
pub fn expected_mean_payoffs(chain: &MarkovChain, rewards: &[RewardStructure]) -> Result<Vec<Rational>> {
    let n = chain.num_states();
    let step: Vec<Vec<Rational>> = rewards
        .iter()
        .map(|r| {
            chain
                .transitions
                .iter()
                .map(|row| row.iter().map(|t| &t.prob * r.get(t.action)).sum())
                .collect()
        })
        .collect();
    let rows = chain.probability_rows();
    let dec = bsccs(chain);

    // value[k][s] for every state
    let mut value = vec![vec![Rational::zero(); n]; rewards.len()];
    for bottom in &dec.bottoms {
        let pi = stationary(&rows, bottom)
            .ok_or_else(|| Error::Internal("singular stationary system for a bottom SCC".into()))?;
        for (k, st) in step.iter().enumerate() {
            let v: Rational = bottom.iter().zip(&pi).map(|(&s, p)| p * &st[s]).sum();
            for &s in bottom {
                value[k][s] = v.clone();
            }
        }
    }

    if !dec.transient.is_empty() {
        let pos: HashMap<usize, usize> = dec.transient.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let m = dec.transient.len();
        let mut a = vec![vec![Rational::zero(); m]; m];
        let mut cols = vec![vec![Rational::zero(); m]; rewards.len()];
        for (i, &s) in dec.transient.iter().enumerate() {
            a[i][i] += Rational::one();
            for (t, p) in &rows[s] {
                match pos.get(t) {
                    Some(&j) => a[i][j] -= p,
                    None => {
                        for k in 0..rewards.len() {
                            cols[k][i] += p * &value[k][*t];
                        }
                    }
                }
            }
        }
        let h = solve_columns(a, cols).ok_or_else(|| Error::Internal("singular absorption system".into()))?;
        for (k, hk) in h.into_iter().enumerate() {
            for (i, &s) in dec.transient.iter().enumerate() {
                value[k][s] = hk[i].clone();
            }
        }
    }

    Ok(value
        .iter()
        .map(|vk| chain.initial.iter().map(|(s, p)| p * &vk[*s]).sum())
        .collect())
}

/// Stationary distribution of the irreducible chain restricted to `states`,
/// in the order of `states`.
fn stationary(rows: &[Vec<(usize, Rational)>], states: &[usize]) -> Option<Vec<Rational>> {
    let m = states.len();
    let pos: HashMap<usize, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    // row j: pi_j - sum_i pi_i P(i, j) = 0; the last row becomes sum pi = 1
    let mut a = vec![vec![Rational::zero(); m]; m];
    for (j, row) in a.iter_mut().enumerate() {
        row[j] = Rational::one();
    }
    for (i, &s) in states.iter().enumerate() {
        for (t, p) in &rows[s] {
            let j = pos[t];
            a[j][i] -= p;
        }
    }
    let mut b = vec![Rational::zero(); m];
    a[m - 1] = vec![Rational::one(); m];
    b[m - 1] = Rational::one();
    crate::linalg::solve(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, rat};
    use crate::strategy::{MemorylessStrategy, TwoMemoryStrategy};

    #[test]
    fn m3_cycle_has_value_one() {
        let m = fixtures::m3();
        let st = Strategy::Memoryless(MemorylessStrategy {
            choice: vec![vec![(0, int(1))], vec![(1, int(1))]],
        });
        let pc = product_chain(&m.mdp, &st);
        assert!(pc.chain.validate().is_empty());
        assert_eq!(
            expected_mean_payoffs(&pc.chain, &m.rewards).unwrap(),
            vec![int(1)]
        );
    }

    #[test]
    fn m2_always_go() {
        let m = fixtures::m2();
        let st = Strategy::Memoryless(MemorylessStrategy {
            choice: vec![vec![(1, int(1))], vec![(2, int(1))]],
        });
        let pc = product_chain(&m.mdp, &st);
        assert_eq!(pc.chain.successors(0), vec![1]);
        assert_eq!(pc.chain.successors(1), vec![1]);
        assert_eq!(
            expected_mean_payoffs(&pc.chain, &m.rewards).unwrap(),
            vec![int(0), int(1)]
        );
    }

    #[test]
    fn m1_uniform_is_one_state() {
        let m = fixtures::m1();
        let st = Strategy::Memoryless(MemorylessStrategy {
            choice: vec![vec![(0, rat(1, 2)), (1, rat(1, 2))]],
        });
        let pc = product_chain(&m.mdp, &st);
        assert_eq!(pc.chain.num_states(), 1);
        assert_eq!(pc.chain.probability_rows()[0], vec![(0, int(1))]);
        assert_eq!(
            expected_mean_payoffs(&pc.chain, &m.rewards).unwrap(),
            vec![rat(1, 2), rat(1, 2)]
        );
    }

    #[test]
    fn m2_two_memory_witness() {
        let m = fixtures::m2();
        let st = Strategy::TwoMemory(TwoMemoryStrategy {
            transient: vec![vec![(1, int(1))], vec![(2, int(1))]],
            recurrent: vec![Some(vec![(0, int(1))]), Some(vec![(2, int(1))])],
            switch: vec![rat(1, 2), int(1)],
        });
        let pc = product_chain(&m.mdp, &st);
        assert!(pc.chain.validate().is_empty());
        assert_eq!(pc.chain.state_names, vec!["(s0,r)", "(s0,t)", "(s1,r)"]);
        assert_eq!(pc.chain.initial, vec![(0, rat(1, 2)), (1, rat(1, 2))]);
        assert_eq!(pc.modes[1], Some(Mode::Transient));
        assert_eq!(
            expected_mean_payoffs(&pc.chain, &m.rewards).unwrap(),
            vec![rat(1, 2), rat(1, 2)]
        );
    }

    #[test]
    fn transient_states_average_their_bottoms() {
        // s0 -a-> {s1: 1/4, s2: 3/4}; s1, s2 absorbing with rewards 4 and 0
        let mut b = crate::mdp::MdpBuilder::new();
        let s0 = b.add_state("s0");
        let s1 = b.add_state("s1");
        let s2 = b.add_state("s2");
        b.add_action("a", s0, vec![(s1, rat(1, 4)), (s2, rat(3, 4))]);
        let l1 = b.add_action("l1", s1, vec![(s1, int(1))]);
        b.add_action("l2", s2, vec![(s2, int(1))]);
        b.set_initial(s0);
        let mdp = b.build().unwrap();
        let r = RewardStructure::new("r").with(l1, int(4));
        let st = Strategy::Memoryless(MemorylessStrategy {
            choice: vec![vec![(0, int(1))], vec![(1, int(1))], vec![(2, int(1))]],
        });
        let pc = product_chain(&mdp, &st);
        assert_eq!(expected_mean_payoffs(&pc.chain, &[r]).unwrap(), vec![int(1)]);
    }
}
