//! Line-oriented interactive simulation of a strategy.
//!
//! Commands: `step [n]`, `dist`, `reset`, `seed <k>`, `quit`. Stepping from
//! a fresh `reset` reproduces [`simulate`](crate::strategy::simulate) with
//! the same seed.

use std::fmt::Write;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mdp::{Mdp, RewardStructure};
use crate::rational::{fmt_rational, int, to_f64, Rational};
use crate::strategy::{product_chain, sample_index, Distribution, Mode, ProductChain, Strategy};

pub const HELP: &str = "commands: step [n] | dist | reset | seed <k> | quit\n";

pub struct Session<'a> {
    mdp: &'a Mdp,
    rewards: &'a [RewardStructure],
    strategy: Strategy,
    product: ProductChain,
    seed: u64,
    rng: ChaCha8Rng,
    state: usize,
    steps: usize,
    sums: Vec<Rational>,
}

impl<'a> Session<'a> {
    pub fn new(mdp: &'a Mdp, rewards: &'a [RewardStructure], strategy: Strategy, seed: u64) -> Self {
        let product = product_chain(mdp, &strategy);
        let mut s = Session {
            mdp,
            rewards,
            strategy,
            product,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            state: 0,
            steps: 0,
            sums: Vec::new(),
        };
        s.reset();
        s
    }

    fn reset(&mut self) {
        self.rng = ChaCha8Rng::seed_from_u64(self.seed);
        let init = &self.product.chain.initial;
        self.state = init[sample_index(&mut self.rng, init.iter().map(|(_, p)| p))].0;
        self.steps = 0;
        self.sums = vec![Rational::zero(); self.rewards.len()];
    }

    /// Current chain state name, e.g. `s0` or `(s0,t)`.
    pub fn state_name(&self) -> &str {
        &self.product.chain.state_names[self.state]
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn step(&mut self, out: &mut String) {
        let row = &self.product.chain.transitions[self.state];
        let edge = &row[sample_index(&mut self.rng, row.iter().map(|e| &e.prob))];
        self.steps += 1;
        for (sum, r) in self.sums.iter_mut().zip(self.rewards) {
            *sum += r.get(edge.action);
        }
        let n = int(self.steps as i64);
        let _ = write!(
            out,
            "{} {} --{}--> {}",
            self.steps,
            self.product.chain.state_names[self.state],
            self.mdp.action(edge.action).name,
            self.product.chain.state_names[edge.target]
        );
        for (sum, r) in self.sums.iter().zip(self.rewards) {
            let _ = write!(out, " {}={:.6}", r.name, to_f64(&(sum / &n)));
        }
        out.push('\n');
        self.state = edge.target;
    }

    fn fmt_dist(&self, d: &Distribution) -> String {
        d.iter()
            .map(|(a, p)| format!("{}:{}", self.mdp.action(*a).name, fmt_rational(p)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn dist(&self) -> String {
        let s = self.product.chain.mdp_state[self.state];
        let mut out = format!("state {}\n", self.state_name());
        match &self.strategy {
            Strategy::Memoryless(m) => {
                let _ = writeln!(out, "choice {}", self.fmt_dist(&m.choice[s]));
            }
            Strategy::TwoMemory(t) => {
                let mode = self.product.modes[self.state].unwrap_or(Mode::Transient);
                let _ = writeln!(out, "mode {}", mode.letter());
                let _ = writeln!(out, "switch {}", fmt_rational(&t.switch[s]));
                let _ = writeln!(out, "transient {}", self.fmt_dist(&t.transient[s]));
                let rec = t.recurrent[s]
                    .as_ref()
                    .map(|d| self.fmt_dist(d))
                    .unwrap_or_else(|| "-".into());
                let _ = writeln!(out, "recurrent {rec}");
            }
        }
        out
    }

    /// Executes one command. Returns `None` on `quit`.
    pub fn handle(&mut self, line: &str) -> Option<String> {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["quit"] | ["exit"] => None,
            [] => Some(String::new()),
            ["step"] => {
                let mut out = String::new();
                self.step(&mut out);
                Some(out)
            }
            ["step", n] => Some(match n.parse::<usize>() {
                Ok(n) => {
                    let mut out = String::new();
                    for _ in 0..n {
                        self.step(&mut out);
                    }
                    out
                }
                Err(_) => format!("not a step count: {n}\n{HELP}"),
            }),
            ["dist"] => Some(self.dist()),
            ["reset"] => {
                self.reset();
                Some(format!("reset to {}\n", self.state_name()))
            }
            ["seed", k] => Some(match k.parse::<u64>() {
                Ok(k) => {
                    self.seed = k;
                    self.reset();
                    format!("seed {k}, reset to {}\n", self.state_name())
                }
                Err(_) => format!("not a seed: {k}\n{HELP}"),
            }),
            _ => Some(HELP.into()),
        }
    }
}
