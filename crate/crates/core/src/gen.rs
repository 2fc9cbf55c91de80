//! Seeded random models for property-based tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mdp::{MdpBuilder, Model, RewardStructure};
use crate::rational::{int, rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub max_states: usize,
    pub max_actions: usize,
    /// Rewards are drawn from `0..=max_reward`.
    pub max_reward: i64,
    pub rewards: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_states: 5,
            max_actions: 3,
            max_reward: 2,
            rewards: 2,
        }
    }
}

/// A random model with states `s0, s1, ...` and reward structures
/// `r1, r2, ...`. Transition probabilities are multiples of 1/4.
pub fn random_model(seed: u64, params: GenParams) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=params.max_states.max(1));
    let mut b = MdpBuilder::new();
    for s in 0..n {
        b.add_state(format!("s{s}"));
    }
    let mut rewards: Vec<RewardStructure> = (1..=params.rewards)
        .map(|i| RewardStructure::new(format!("r{i}")))
        .collect();
    for s in 0..n {
        for k in 0..rng.random_range(1..=params.max_actions.max(1)) {
            // split four quarters over at most two successors
            let t1 = rng.random_range(0..n);
            let t2 = rng.random_range(0..n);
            let q = rng.random_range(1..=4i64);
            let succ = if q == 4 || t1 == t2 {
                vec![(t1, int(1))]
            } else {
                vec![(t1, rat(q, 4)), (t2, rat(4 - q, 4))]
            };
            let a = b.add_action(format!("a{s}_{k}"), s, succ);
            for r in rewards.iter_mut() {
                let v = rng.random_range(0..=params.max_reward);
                if v != 0 {
                    r.set(a, int(v));
                }
            }
        }
    }
    b.set_initial(0);
    Model {
        mdp: b.build().expect("generated model is well formed"),
        rewards,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        for seed in 0..50 {
            let a = random_model(seed, GenParams::default());
            assert_eq!(a, random_model(seed, GenParams::default()));
            assert!(a.mdp.num_states() <= 5);
            for s in 0..a.mdp.num_states() {
                let k = a.mdp.enabled(s).len();
                assert!((1..=3).contains(&k));
            }
        }
    }
}
