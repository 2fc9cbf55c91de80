use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use super::ast::{Program, RewardScope};
use crate::error::{Error, Result};
use crate::mdp::{MdpBuilder, Model, RewardStructure};
use crate::rational::Rational;

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Breadth-first exploration of the reachable state space.
///
/// States are named by their valuation (`x=0,y=1`) and numbered in
/// discovery order. Every enabled command contributes one action named by
/// its label, or `cmd<i>` with `i` the command's 0-based position; a name
/// already used in the same state gets `#<i>` appended. Updates leading to
/// the same successor are merged, zero-probability updates dropped.
pub fn explore(program: &Program, cap: usize) -> Result<Model> {
    let init: Vec<i64> = program.variables.iter().map(|v| v.init).collect();
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut states: Vec<Vec<i64>> = Vec::new();
    let mut builder = MdpBuilder::new();
    let mut rewards: Vec<RewardStructure> = program
        .rewards
        .iter()
        .map(|r| RewardStructure::new(r.name.clone()))
        .collect();

    let mut intern = |v: Vec<i64>, builder: &mut MdpBuilder, states: &mut Vec<Vec<i64>>| -> Result<usize> {
        if let Some(&i) = index.get(&v) {
            return Ok(i);
        }
        if states.len() >= cap {
            return Err(Error::StateCap { cap });
        }
        let id = builder.add_state(program.valuation(&v));
        index.insert(v.clone(), id);
        states.push(v);
        Ok(id)
    };
    let s0 = intern(init, &mut builder, &mut states)?;
    builder.set_initial(s0);

    let mut frontier = 0;
    while frontier < states.len() {
        let s = frontier;
        frontier += 1;
        let state = states[s].clone();
        let mut names: Vec<String> = Vec::new();
        for (ci, cmd) in program.commands.iter().enumerate() {
            if !cmd.guard.eval(&state, cmd.location)?.as_bool()? {
                continue;
            }
            let mut succ: Vec<(usize, Rational)> = Vec::new();
            let mut total = Rational::zero();
            for u in &cmd.updates {
                let p = u.prob.eval(&state, cmd.location)?.as_num()?.clone();
                if p.is_negative() {
                    return Err(Error::Exploration(format!(
                        "negative probability {p} in command at {} in state ({})",
                        cmd.location,
                        program.valuation(&state)
                    )));
                }
                total += &p;
                if p.is_zero() {
                    continue;
                }
                let mut next = state.clone();
                for (var, e) in &u.assignments {
                    let v = e.eval_int(&state, cmd.location)?;
                    let decl = &program.variables[*var];
                    if v < decl.low || v > decl.high {
                        return Err(Error::Exploration(format!(
                            "value {v} for {} outside [{}..{}] in command at {} in state ({})",
                            decl.name,
                            decl.low,
                            decl.high,
                            cmd.location,
                            program.valuation(&state)
                        )));
                    }
                    next[*var] = v;
                }
                let t = intern(next, &mut builder, &mut states)?;
                match succ.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, q)) => *q += p,
                    None => succ.push((t, p)),
                }
            }
            if !total.is_one() {
                return Err(Error::Exploration(format!(
                    "update probabilities sum to {total} in command at {} in state ({})",
                    cmd.location,
                    program.valuation(&state)
                )));
            }
            let base = cmd.label.clone().unwrap_or_else(|| format!("cmd{ci}"));
            let name = if names.contains(&base) {
                format!("{base}#{ci}")
            } else {
                base
            };
            names.push(name.clone());
            let a = builder.add_action(name, s, succ);
            for (decl, structure) in program.rewards.iter().zip(rewards.iter_mut()) {
                for item in &decl.items {
                    let applies = match &item.scope {
                        RewardScope::All => true,
                        RewardScope::Unlabelled => cmd.label.is_none(),
                        RewardScope::Label(l) => cmd.label.as_ref() == Some(l),
                    };
                    if applies && item.guard.eval(&state, item.location)?.as_bool()? {
                        let r = item.value.eval(&state, item.location)?;
                        structure.add(a, r.as_num()?);
                    }
                }
            }
        }
        if names.is_empty() {
            return Err(Error::Deadlock {
                valuation: program.valuation(&state),
            });
        }
    }
    let mdp = builder.build()?;
    Ok(Model { mdp, rewards })
}
