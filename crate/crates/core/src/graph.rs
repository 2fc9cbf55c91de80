//! Structural decompositions: SCCs, maximal end components, unichain test
//! and bottom SCCs of Markov chains.

use crate::mdp::{ActionId, MarkovChain, Mdp, StateId};

/// Strongly connected components of a directed graph given as adjacency
/// lists, in reverse topological order (sinks first). Each component lists
/// its vertices in ascending order.
///
/// Iterative Tarjan, so deep graphs do not overflow the stack.
pub fn sccs(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adjacency.len();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0usize;
    // (vertex, next edge position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(frame) = call.last_mut() {
            let v = frame.0;
            if let Some(&w) = adjacency[v].get(frame.1) {
                frame.1 += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    components
}

/// Component index per vertex for the output of [`sccs`].
pub fn component_ids(n: usize, components: &[Vec<usize>]) -> Vec<usize> {
    let mut id = vec![usize::MAX; n];
    for (c, comp) in components.iter().enumerate() {
        for &v in comp {
            id[v] = c;
        }
    }
    id
}

/// An end component `(T, B)`; both lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndComponent {
    pub states: Vec<StateId>,
    pub actions: Vec<ActionId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MecDecomposition {
    /// Ordered by smallest member state.
    pub mecs: Vec<EndComponent>,
    mec_of: Vec<Option<usize>>,
    action_mec: Vec<Option<usize>>,
}

impl MecDecomposition {
    /// `S_MEC`, ascending.
    pub fn mec_states(&self) -> Vec<StateId> {
        (0..self.mec_of.len())
            .filter(|&s| self.mec_of[s].is_some())
            .collect()
    }

    pub fn mec_of(&self, s: StateId) -> Option<usize> {
        self.mec_of[s]
    }

    pub fn in_mec(&self, s: StateId) -> bool {
        self.mec_of[s].is_some()
    }

    /// Whether `a` belongs to the action set of some MEC.
    pub fn action_in_mec(&self, a: ActionId) -> bool {
        self.action_mec[a].is_some()
    }
}

/// Maximal end components by iterated SCC refinement: drop actions that can
/// leave their source's SCC, drop states left without actions, repeat.
pub fn mec_decomposition(mdp: &Mdp) -> MecDecomposition {
    let n = mdp.num_states();
    let m = mdp.num_actions();
    let mut state_alive = vec![true; n];
    let mut action_alive = vec![true; m];

    let comp_id = loop {
        let adjacency: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                if !state_alive[s] {
                    return Vec::new();
                }
                let mut out = Vec::new();
                for &a in mdp.enabled(s) {
                    if action_alive[a] {
                        out.extend(mdp.successors(a).filter(|&t| state_alive[t]));
                    }
                }
                out
            })
            .collect();
        let comps = sccs(&adjacency);
        let comp_id = component_ids(n, &comps);

        let mut changed = false;
        for a in 0..m {
            if !action_alive[a] {
                continue;
            }
            let src = mdp.source(a);
            let leaves = !state_alive[src]
                || mdp
                    .successors(a)
                    .any(|t| !state_alive[t] || comp_id[t] != comp_id[src]);
            if leaves {
                action_alive[a] = false;
                changed = true;
            }
        }
        for s in 0..n {
            if state_alive[s] && !mdp.enabled(s).iter().any(|&a| action_alive[a]) {
                state_alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            break comp_id;
        }
    };

    let mut mecs: Vec<EndComponent> = Vec::new();
    let mut mec_of = vec![None; n];
    let mut comp_to_mec = std::collections::HashMap::new();
    for s in 0..n {
        if !state_alive[s] {
            continue;
        }
        let k = *comp_to_mec.entry(comp_id[s]).or_insert_with(|| {
            mecs.push(EndComponent {
                states: Vec::new(),
                actions: Vec::new(),
            });
            mecs.len() - 1
        });
        mecs[k].states.push(s);
        mecs[k]
            .actions
            .extend(mdp.enabled(s).iter().copied().filter(|&a| action_alive[a]));
        mec_of[s] = Some(k);
    }
    let mut action_mec = vec![None; m];
    for (k, mec) in mecs.iter_mut().enumerate() {
        mec.actions.sort_unstable();
        for &a in &mec.actions {
            action_mec[a] = Some(k);
        }
    }
    MecDecomposition {
        mecs,
        mec_of,
        action_mec,
    }
}

/// Whether `(states, actions)` is an end component: nonempty, every action
/// sourced in and closed within `states`, each state keeps an action, and
/// the restricted graph is strongly connected.
pub fn is_end_component(mdp: &Mdp, states: &[StateId], actions: &[ActionId]) -> bool {
    if states.is_empty() {
        return false;
    }
    let n = mdp.num_states();
    let mut inside = vec![false; n];
    for &s in states {
        inside[s] = true;
    }
    let mut has_action = vec![false; n];
    let mut adjacency = vec![Vec::new(); n];
    for &a in actions {
        let src = mdp.source(a);
        if !inside[src] || mdp.successors(a).any(|t| !inside[t]) {
            return false;
        }
        has_action[src] = true;
        adjacency[src].extend(mdp.successors(a));
    }
    if states.iter().any(|&s| !has_action[s]) {
        return false;
    }
    let comps = sccs(&adjacency);
    let ids = component_ids(n, &comps);
    states.iter().all(|&s| ids[s] == ids[states[0]])
}

/// True iff every choice of at least one action per state yields an end
/// component covering all states. Decided over deterministic selections:
/// a larger selection only adds edges, so it fails only if some
/// deterministic sub-selection fails. Exponential in the number of states
/// with several actions.
pub fn is_unichain(mdp: &Mdp) -> bool {
    let n = mdp.num_states();
    let mut choice = vec![0usize; n];
    loop {
        let adjacency: Vec<Vec<usize>> = (0..n)
            .map(|s| mdp.successors(mdp.enabled(s)[choice[s]]).collect())
            .collect();
        if sccs(&adjacency).len() != 1 {
            return false;
        }
        // odometer over per-state choices
        let mut s = 0;
        loop {
            if s == n {
                return true;
            }
            choice[s] += 1;
            if choice[s] < mdp.enabled(s).len() {
                break;
            }
            choice[s] = 0;
            s += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BsccDecomposition {
    /// Bottom SCCs in reverse topological order of the chain's SCC DAG.
    pub bottoms: Vec<Vec<usize>>,
    /// States outside every bottom SCC, ascending.
    pub transient: Vec<usize>,
}

pub fn bsccs(chain: &MarkovChain) -> BsccDecomposition {
    let n = chain.num_states();
    let adjacency: Vec<Vec<usize>> = (0..n).map(|s| chain.successors(s)).collect();
    let comps = sccs(&adjacency);
    let ids = component_ids(n, &comps);
    let mut bottoms = Vec::new();
    let mut in_bottom = vec![false; n];
    for (c, comp) in comps.iter().enumerate() {
        if comp.iter().all(|&s| adjacency[s].iter().all(|&t| ids[t] == c)) {
            for &s in comp {
                in_bottom[s] = true;
            }
            bottoms.push(comp.clone());
        }
    }
    BsccDecomposition {
        bottoms,
        transient: (0..n).filter(|&s| !in_bottom[s]).collect(),
    }
}
