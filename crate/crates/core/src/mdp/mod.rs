//! Explicit finite MDPs with exact transition probabilities.
//!
//! States and actions are dense indices in declaration order; their names
//! live in side tables. Every action belongs to exactly one source state, so
//! a reward `r(s, a)` is keyed by the action alone.

mod chain;
pub mod explicit;

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use chain::{ChainTransition, MarkovChain};

pub type StateId = usize;
pub type ActionId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub source: StateId,
    pub successors: Vec<(StateId, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mdp {
    state_names: Vec<String>,
    actions: Vec<Action>,
    enabled: Vec<Vec<ActionId>>,
    initial: StateId,
}

impl Mdp {
    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|n| n == name)
    }

    pub fn action(&self, a: ActionId) -> &Action {
        &self.actions[a]
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    /// `Act(s)` in declaration order.
    pub fn enabled(&self, s: StateId) -> &[ActionId] {
        &self.enabled[s]
    }

    pub fn source(&self, a: ActionId) -> StateId {
        self.actions[a].source
    }

    pub fn action_by_name(&self, s: StateId, name: &str) -> Option<ActionId> {
        self.enabled[s]
            .iter()
            .copied()
            .find(|&a| self.actions[a].name == name)
    }

    /// `name@state`, unique across the model.
    pub fn action_label(&self, a: ActionId) -> String {
        let act = &self.actions[a];
        format!("{}@{}", act.name, self.state_names[act.source])
    }

    /// All (state, successor) edges, one per action/successor pair.
    pub fn successors(&self, a: ActionId) -> impl Iterator<Item = StateId> + '_ {
        self.actions[a].successors.iter().map(|(t, _)| *t)
    }
}

/// Incremental construction. [`MdpBuilder::build`] validates;
/// [`MdpBuilder::build_unchecked`] does not, which is only useful for
/// exercising [`validate`].
#[derive(Debug, Default, Clone)]
pub struct MdpBuilder {
    state_names: Vec<String>,
    actions: Vec<Action>,
    initial: Option<StateId>,
}

impl MdpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> StateId {
        self.state_names.push(name.into());
        self.state_names.len() - 1
    }

    pub fn add_action(
        &mut self,
        name: impl Into<String>,
        source: StateId,
        successors: Vec<(StateId, Rational)>,
    ) -> ActionId {
        self.actions.push(Action {
            name: name.into(),
            source,
            successors,
        });
        self.actions.len() - 1
    }

    pub fn set_initial(&mut self, s: StateId) -> &mut Self {
        self.initial = Some(s);
        self
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn build_unchecked(self) -> Mdp {
        let n = self.state_names.len();
        let mut enabled = vec![Vec::new(); n];
        for (a, act) in self.actions.iter().enumerate() {
            if act.source < n {
                enabled[act.source].push(a);
            }
        }
        Mdp {
            state_names: self.state_names,
            actions: self.actions,
            enabled,
            initial: self.initial.unwrap_or(usize::MAX),
        }
    }

    pub fn build(self) -> Result<Mdp> {
        let mdp = self.build_unchecked();
        let diagnostics = validate(&mdp);
        if diagnostics.is_empty() {
            Ok(mdp)
        } else {
            Err(Error::Validation(diagnostics))
        }
    }
}

/// One diagnostic per violated invariant; empty iff the MDP is well formed.
pub fn validate(mdp: &Mdp) -> Vec<String> {
    let mut out = Vec::new();
    let n = mdp.num_states();
    if n == 0 {
        out.push("model has no states".to_string());
    }
    let mut seen = HashSet::new();
    for name in &mdp.state_names {
        if !seen.insert(name.as_str()) {
            out.push(format!("duplicate state name {name}"));
        }
    }
    if mdp.initial >= n && n > 0 {
        out.push("initial state is missing or invalid".to_string());
    }
    for s in 0..n {
        if mdp.enabled[s].is_empty() {
            out.push(format!("state {} has empty Act", mdp.state_names[s]));
        }
        let mut names = HashSet::new();
        for &a in &mdp.enabled[s] {
            if !names.insert(mdp.actions[a].name.as_str()) {
                out.push(format!(
                    "state {}: duplicate action name {}",
                    mdp.state_names[s], mdp.actions[a].name
                ));
            }
        }
    }
    for act in &mdp.actions {
        if act.source >= n {
            out.push(format!(
                "action {}: source {} is not a valid state",
                act.name, act.source
            ));
        }
        if act.successors.is_empty() {
            out.push(format!("action {}: no successors", act.name));
            continue;
        }
        let mut total = Rational::zero();
        let mut targets = HashSet::new();
        for (t, p) in &act.successors {
            if *t >= n {
                out.push(format!("action {}: successor {t} is not a valid state", act.name));
            } else if !targets.insert(*t) {
                out.push(format!(
                    "action {}: successor {} listed twice",
                    act.name, mdp.state_names[*t]
                ));
            }
            if !p.is_positive() {
                out.push(format!("action {}: probability {p} not positive", act.name));
            }
            total += p;
        }
        if !total.is_one() {
            out.push(format!("action {}: distribution sums to {total}", act.name));
        }
    }
    out
}

/// A reward function over actions; absent entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewardStructure {
    pub name: String,
    rewards: BTreeMap<ActionId, Rational>,
}

impl RewardStructure {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            rewards: BTreeMap::new(),
        }
    }

    pub fn with(mut self, a: ActionId, r: Rational) -> Self {
        self.set(a, r);
        self
    }

    pub fn get(&self, a: ActionId) -> Rational {
        self.rewards.get(&a).cloned().unwrap_or_else(Rational::zero)
    }

    /// Zero entries are not stored, so equality is semantic.
    pub fn set(&mut self, a: ActionId, r: Rational) {
        if r.is_zero() {
            self.rewards.remove(&a);
        } else {
            self.rewards.insert(a, r);
        }
    }

    pub fn add(&mut self, a: ActionId, r: &Rational) {
        let v = self.get(a) + r;
        self.set(a, v);
    }

    pub fn entries(&self) -> impl Iterator<Item = (ActionId, &Rational)> {
        self.rewards.iter().map(|(a, r)| (*a, r))
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = RewardStructure::new(self.name.clone());
        for (a, r) in &self.rewards {
            out.set(*a, r * c);
        }
        out
    }

    pub fn negated(&self) -> Self {
        self.scaled(&-Rational::one())
    }

    pub fn max_abs(&self) -> Rational {
        self.rewards
            .values()
            .map(|r| r.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// An MDP together with its named reward structures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub mdp: Mdp,
    pub rewards: Vec<RewardStructure>,
}

impl Model {
    pub fn reward(&self, name: &str) -> Result<&RewardStructure> {
        self.rewards
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownReward(name.to_string()))
    }

    /// Diagnostics for the MDP plus reward keys that are not actions.
    pub fn validate(&self) -> Vec<String> {
        let mut out = validate(&self.mdp);
        for r in &self.rewards {
            for (a, _) in r.entries() {
                if a >= self.mdp.num_actions() {
                    out.push(format!("reward {}: action {a} does not exist", r.name));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn fixtures_are_valid() {
        assert!(validate(&crate::fixtures::m1().mdp).is_empty());
        assert!(validate(&crate::fixtures::m2().mdp).is_empty());
        assert!(validate(&crate::fixtures::m3().mdp).is_empty());
    }

    #[test]
    fn empty_act_is_reported() {
        let mut b = MdpBuilder::new();
        let s0 = b.add_state("s0");
        b.add_state("s1");
        b.add_action("a", s0, vec![(s0, int(1))]);
        b.set_initial(s0);
        assert_eq!(validate(&b.build_unchecked()), vec!["state s1 has empty Act"]);
    }

    #[test]
    fn negative_probability_is_reported() {
        let mut b = MdpBuilder::new();
        let s0 = b.add_state("s0");
        let s1 = b.add_state("s1");
        b.add_action("a", s0, vec![(s0, rat(-1, 2)), (s1, rat(3, 2))]);
        b.add_action("b", s1, vec![(s1, int(1))]);
        b.set_initial(s0);
        assert_eq!(
            validate(&b.build_unchecked()),
            vec!["action a: probability -1/2 not positive"]
        );
    }

    #[test]
    fn bad_sum_zero_entry_and_bad_target() {
        let mut b = MdpBuilder::new();
        let s0 = b.add_state("s0");
        b.add_action("a", s0, vec![(s0, rat(1, 2)), (7, rat(1, 3))]);
        b.add_action("b", s0, vec![(s0, int(0)), (s0, int(1))]);
        b.set_initial(s0);
        let diags = validate(&b.build_unchecked());
        assert!(diags.contains(&"action a: successor 7 is not a valid state".to_string()));
        assert!(diags.contains(&"action a: distribution sums to 5/6".to_string()));
        assert!(diags.contains(&"action b: probability 0 not positive".to_string()));
        assert!(diags.contains(&"action b: successor s0 listed twice".to_string()));
    }

    #[test]
    fn reward_structure_drops_zeros() {
        let mut r = RewardStructure::new("r");
        r.set(0, int(0));
        r.set(1, rat(1, 2));
        r.add(1, &rat(-1, 2));
        assert_eq!(r, RewardStructure::new("r"));
        assert_eq!(r.get(3), int(0));
    }
}
