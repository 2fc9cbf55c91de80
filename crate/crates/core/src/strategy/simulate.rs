use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mdp::{ActionId, MarkovChain, RewardStructure};
use crate::rational::{int, to_f64, Rational};

/// One simulated step: the chain state the step started from, the action
/// taken there, and the running average of each reward after the step.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub state: usize,
    pub action: ActionId,
    pub averages: Vec<f64>,
}

/// Samples an index from positive weights summing to one, comparing a
/// uniform 64-bit draw against the exact cumulative sums.
pub fn sample_index<'a>(rng: &mut impl RngCore, probs: impl IntoIterator<Item = &'a Rational>) -> usize {
    let u = BigInt::from(rng.next_u64());
    let scale = BigInt::one() << 64;
    let mut cum = Rational::zero();
    let mut last = 0;
    for (i, p) in probs.into_iter().enumerate() {
        cum += p;
        last = i;
        // u / 2^64 < cum
        if &u * cum.denom() < cum.numer() * &scale {
            return i;
        }
    }
    last
}

/// Runs `steps` transitions of `chain` from a sampled initial state.
/// Identical seeds give identical traces.
pub fn simulate(chain: &MarkovChain, rewards: &[RewardStructure], steps: usize, seed: u64) -> Vec<TraceStep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = chain.initial[sample_index(&mut rng, chain.initial.iter().map(|(_, p)| p))].0;
    let mut sums = vec![Rational::zero(); rewards.len()];
    let mut trace = Vec::with_capacity(steps);
    for t in 1..=steps {
        let row = &chain.transitions[state];
        let edge = &row[sample_index(&mut rng, row.iter().map(|e| &e.prob))];
        for (sum, r) in sums.iter_mut().zip(rewards) {
            *sum += r.get(edge.action);
        }
        let n = int(t as i64);
        trace.push(TraceStep {
            state,
            action: edge.action,
            averages: sums.iter().map(|s| to_f64(&(s / &n))).collect(),
        });
        state = edge.target;
    }
    trace
}
