//! Independent brute-force oracles shared by the integration tests.
//!
//! Nothing here calls the library's graph, linear algebra or strategy
//! evaluation code; only model accessors and `solve_lp` (itself checked
//! against vertex enumeration) are used.

#![allow(dead_code)]

use std::collections::BTreeSet;

use mpsynth::lp::{
    solve_lp, Atom, AtomRelation, Clause, DisjunctiveProgram, LinExpr, LinearProgram, LpOutcome, Relation,
    Sense, VarBound,
};
use mpsynth::mdp::{ActionId, Mdp, Model, StateId};
use mpsynth::strategy::{MemorylessStrategy, TwoMemoryStrategy};
use mpsynth::Rational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn ri(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Gaussian elimination on a square system; `None` if singular.
pub fn gauss(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
                let t = &f * &b[c];
                b[i] -= t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn reach(p: &[Vec<Rational>]) -> Vec<Vec<bool>> {
    let n = p.len();
    let mut m: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i == j || !p[i][j].is_zero()).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    m
}

/// Expected long-run average of each state reward vector, starting from
/// `init`, for a finite chain with dense transition matrix `p`.
pub fn chain_values(p: &[Vec<Rational>], init: &[Rational], rewards: &[Vec<Rational>]) -> Vec<Rational> {
    let n = p.len();
    let m = reach(p);
    let recurrent: Vec<bool> = (0..n).map(|i| (0..n).all(|j| !m[i][j] || m[j][i])).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; n];
    for i in 0..n {
        if recurrent[i] && !seen[i] {
            let c: Vec<usize> = (0..n).filter(|&j| m[i][j]).collect();
            for &j in &c {
                seen[j] = true;
            }
            classes.push(c);
        }
    }
    let transient: Vec<usize> = (0..n).filter(|&i| !recurrent[i]).collect();
    let mut out = vec![Rational::zero(); rewards.len()];
    for c in &classes {
        // stationary: pi (P_c - I) = 0 with the last equation replaced by sum pi = 1
        let k = c.len();
        let mut a = vec![vec![Rational::zero(); k]; k];
        for (row, &j) in c.iter().enumerate().take(k - 1) {
            for (col, &i) in c.iter().enumerate() {
                a[row][col] = p[i][j].clone() - if i == j { Rational::one() } else { Rational::zero() };
            }
        }
        for x in a[k - 1].iter_mut() {
            *x = Rational::one();
        }
        let mut b = vec![Rational::zero(); k];
        b[k - 1] = Rational::one();
        let pi = gauss(a, b).expect("irreducible class has a stationary distribution");
        // absorption probabilities h_t = sum_j P_tj h_j, h = 1 on c
        let t = transient.len();
        let mut ha = vec![vec![Rational::zero(); t]; t];
        let mut hb = vec![Rational::zero(); t];
        for (x, &i) in transient.iter().enumerate() {
            for (y, &j) in transient.iter().enumerate() {
                ha[x][y] = if x == y { Rational::one() } else { Rational::zero() } - &p[i][j];
            }
            hb[x] = c.iter().map(|&j| p[i][j].clone()).sum();
        }
        let h = if t == 0 {
            Vec::new()
        } else {
            gauss(ha, hb).expect("transient states leave eventually")
        };
        let mut mass: Rational = c.iter().map(|&i| init[i].clone()).sum();
        for (x, &i) in transient.iter().enumerate() {
            mass += &init[i] * &h[x];
        }
        for (o, rw) in out.iter_mut().zip(rewards) {
            let avg: Rational = c.iter().zip(&pi).map(|(&i, q)| q * &rw[i]).sum();
            *o += &mass * avg;
        }
    }
    out
}

fn state_rewards(model: &Model, dist: &[(ActionId, Rational)]) -> Vec<Rational> {
    model
        .rewards
        .iter()
        .map(|rw| dist.iter().map(|(a, q)| q * rw.get(*a)).sum())
        .collect()
}

fn uniform(mdp: &Mdp, s: StateId) -> Vec<(ActionId, Rational)> {
    let k = mdp.enabled(s).len() as i64;
    mdp.enabled(s).iter().map(|&a| (a, r(1, k))).collect()
}

/// Values of a memoryless strategy given as per-state action distributions.
pub fn memoryless_values(model: &Model, choice: &[Vec<(ActionId, Rational)>]) -> Vec<Rational> {
    let mdp = &model.mdp;
    let n = mdp.num_states();
    let mut p = vec![vec![Rational::zero(); n]; n];
    let mut rew = vec![vec![Rational::zero(); n]; model.rewards.len()];
    for s in 0..n {
        for (a, q) in &choice[s] {
            for (t, pr) in &mdp.action(*a).successors {
                p[s][*t] += q * pr;
            }
        }
        for (k, v) in state_rewards(model, &choice[s]).into_iter().enumerate() {
            rew[k][s] = v;
        }
    }
    let mut init = vec![Rational::zero(); n];
    init[mdp.initial()] = Rational::one();
    chain_values(&p, &init, &rew)
}

pub fn memoryless_strategy_values(model: &Model, st: &MemorylessStrategy) -> Vec<Rational> {
    memoryless_values(model, &st.choice)
}

/// Values of a two-memory strategy on the `2|S|` product, index `2s` for
/// transient and `2s+1` for recurrent mode.
pub fn two_memory_values(model: &Model, st: &TwoMemoryStrategy) -> Vec<Rational> {
    let mdp = &model.mdp;
    let n = mdp.num_states();
    let mut p = vec![vec![Rational::zero(); 2 * n]; 2 * n];
    let mut rew = vec![vec![Rational::zero(); 2 * n]; model.rewards.len()];
    for s in 0..n {
        let rec = st.recurrent[s].clone().unwrap_or_else(|| uniform(mdp, s));
        for (mode, dist) in [(0, &st.transient[s]), (1, &rec)] {
            for (a, q) in dist {
                for (t, pr) in &mdp.action(*a).successors {
                    let w = q * pr;
                    if mode == 1 {
                        p[2 * s + 1][2 * t + 1] += w;
                    } else {
                        p[2 * s][2 * t + 1] += &w * &st.switch[*t];
                        p[2 * s][2 * t] += &w * (Rational::one() - &st.switch[*t]);
                    }
                }
            }
            for (k, v) in state_rewards(model, dist).into_iter().enumerate() {
                rew[k][2 * s + mode] = v;
            }
        }
    }
    let mut init = vec![Rational::zero(); 2 * n];
    let s0 = mdp.initial();
    init[2 * s0 + 1] = st.switch[s0].clone();
    init[2 * s0] = Rational::one() - &st.switch[s0];
    chain_values(&p, &init, &rew)
}

/// Value vectors of every deterministic memoryless strategy.
pub fn deterministic_values(model: &Model) -> Vec<Vec<Rational>> {
    let mdp = &model.mdp;
    let n = mdp.num_states();
    let mut pick = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        let choice: Vec<Vec<(ActionId, Rational)>> = (0..n)
            .map(|s| vec![(mdp.enabled(s)[pick[s]], Rational::one())])
            .collect();
        out.push(memoryless_values(model, &choice));
        let mut s = 0;
        loop {
            if s == n {
                return out;
            }
            pick[s] += 1;
            if pick[s] < mdp.enabled(s).len() {
                break;
            }
            pick[s] = 0;
            s += 1;
        }
    }
}

fn strongly_connected(mdp: &Mdp, states: &[StateId], actions: &[ActionId]) -> bool {
    let inside = |s: StateId| states.contains(&s);
    let reach_from = |start: StateId| {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(s) = stack.pop() {
            for &a in actions.iter().filter(|&&a| mdp.action(a).source == s) {
                for (t, _) in &mdp.action(a).successors {
                    if inside(*t) && seen.insert(*t) {
                        stack.push(*t);
                    }
                }
            }
        }
        seen.len() == states.len()
    };
    states.iter().all(|&s| reach_from(s))
}

/// Actions whose source is in `states` and which never leave it.
fn closed_actions(mdp: &Mdp, states: &[StateId]) -> Vec<ActionId> {
    (0..mdp.num_actions())
        .filter(|&a| {
            let act = mdp.action(a);
            states.contains(&act.source) && act.successors.iter().all(|(t, _)| states.contains(t))
        })
        .collect()
}

/// MECs by enumerating state subsets; sorted by smallest state.
pub fn brute_mecs(mdp: &Mdp) -> Vec<(Vec<StateId>, Vec<ActionId>)> {
    let n = mdp.num_states();
    let mut ecs: Vec<(Vec<StateId>, Vec<ActionId>)> = Vec::new();
    for mask in 1u32..(1 << n) {
        let states: Vec<StateId> = (0..n).filter(|s| mask & (1 << s) != 0).collect();
        let actions = closed_actions(mdp, &states);
        let covered = states
            .iter()
            .all(|&s| actions.iter().any(|&a| mdp.action(a).source == s));
        if covered && strongly_connected(mdp, &states, &actions) {
            ecs.push((states, actions));
        }
    }
    let mut mecs: Vec<_> = ecs
        .iter()
        .filter(|(t, _)| {
            !ecs.iter()
                .any(|(u, _)| u.len() > t.len() && t.iter().all(|s| u.contains(s)))
        })
        .cloned()
        .collect();
    mecs.sort();
    mecs
}

/// Every selection of a nonempty action subset per state forms an end
/// component over all states.
pub fn brute_unichain(mdp: &Mdp) -> bool {
    let n = mdp.num_states();
    let states: Vec<StateId> = (0..n).collect();
    let mut masks = vec![1u32; n];
    loop {
        let actions: Vec<ActionId> = (0..n)
            .flat_map(|s| {
                let en = mdp.enabled(s);
                let m = masks[s];
                (0..en.len())
                    .filter(move |i| m & (1 << i) != 0)
                    .map(move |i| en[i])
            })
            .collect();
        if !strongly_connected(mdp, &states, &actions) {
            return false;
        }
        let mut s = 0;
        loop {
            if s == n {
                return true;
            }
            masks[s] += 1;
            if masks[s] < (1 << mdp.enabled(s).len()) {
                break;
            }
            masks[s] = 1;
            s += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Oracle {
    Infeasible,
    Unbounded,
    Feasible,
    Optimal(Rational),
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Best vertex of the LP intersected with the box `|x_i| <= bound`, and
/// whether that vertex touches the box.
fn boxed_vertex_optimum(lp: &LinearProgram, bound: &Rational) -> Option<(Rational, bool)> {
    let n = lp.num_vars();
    // hyperplanes: (coefficients, rhs)
    let mut planes: Vec<(Vec<Rational>, Rational)> = lp
        .constraints
        .iter()
        .map(|c| ((0..n).map(|v| c.expr.coeff(v)).collect(), c.rhs.clone()))
        .collect();
    for v in 0..n {
        let unit: Vec<Rational> = (0..n).map(|u| if u == v { ri(1) } else { ri(0) }).collect();
        planes.push((unit.clone(), bound.clone()));
        let lo = match lp.variables[v].bound {
            VarBound::NonNegative => ri(0),
            VarBound::Free => -bound.clone(),
        };
        planes.push((unit, lo));
    }
    let feasible = |x: &[Rational]| lp.is_satisfied_by(x) && x.iter().all(|xi| xi.abs() <= *bound);
    let objective = |x: &[Rational]| match &lp.objective {
        Some(o) => {
            let v = o.expr.eval(x);
            if o.sense == Sense::Minimize {
                -v
            } else {
                v
            }
        }
        None => ri(0),
    };
    let mut best: Option<(Rational, bool)> = None;
    for pick in subsets(planes.len(), n) {
        let a = pick.iter().map(|&i| planes[i].0.clone()).collect();
        let b = pick.iter().map(|&i| planes[i].1.clone()).collect();
        let Some(x) = gauss(a, b) else { continue };
        if !feasible(&x) {
            continue;
        }
        let val = objective(&x);
        let on_box = x.iter().any(|xi| xi.abs() == *bound);
        if best.as_ref().is_none_or(|(b, _)| val > *b) {
            best = Some((val, on_box));
        }
    }
    best
}

/// Vertex enumeration oracle. The optimum is reported in the LP's own
/// sense. Needs small integer data so that every vertex lies well inside
/// `|x| <= 10^5`.
pub fn vertex_oracle(lp: &LinearProgram) -> Oracle {
    let big = ri(100_000);
    let Some((val, on_box)) = boxed_vertex_optimum(lp, &big) else {
        return Oracle::Infeasible;
    };
    let Some(obj) = &lp.objective else {
        return Oracle::Feasible;
    };
    if on_box {
        let (val2, _) = boxed_vertex_optimum(lp, &ri(1_000_000)).expect("larger box is feasible");
        if val2 != val {
            return Oracle::Unbounded;
        }
    }
    Oracle::Optimal(if obj.sense == Sense::Minimize { -val } else { val })
}

fn random_expr(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> LinExpr {
    let mut e = LinExpr::new();
    for v in 0..n {
        e.add_term(v, &ri(rng.random_range(lo..=hi)));
    }
    e
}

/// Random LP with at most 4 variables and 6 rows, small integer data.
pub fn random_lp(rng: &mut impl Rng) -> LinearProgram {
    let mut lp = LinearProgram::new();
    let n = rng.random_range(1..=4);
    for v in 0..n {
        let bound = if rng.random_bool(0.8) {
            VarBound::NonNegative
        } else {
            VarBound::Free
        };
        lp.add_var(format!("x{v}"), bound);
    }
    for _ in 0..rng.random_range(1..=6) {
        let rel = match rng.random_range(0..5) {
            0 => Relation::Eq,
            1 => Relation::Ge,
            _ => Relation::Le,
        };
        lp.add_constraint(random_expr(rng, n, -3, 3), rel, ri(rng.random_range(-4..=8)));
    }
    match rng.random_range(0..5) {
        0 => {}
        1 => lp.set_objective(random_expr(rng, n, -3, 3), Sense::Minimize),
        _ => lp.set_objective(random_expr(rng, n, -3, 3), Sense::Maximize),
    }
    lp
}

/// Random disjunctive program over at most 3 non-negative variables with
/// at most 3 clauses.
pub fn random_dp(rng: &mut impl Rng) -> DisjunctiveProgram {
    let mut base = LinearProgram::new();
    let n = rng.random_range(1..=3);
    for v in 0..n {
        base.add_var(format!("x{v}"), VarBound::NonNegative);
    }
    for _ in 0..rng.random_range(0..=3) {
        let rel = if rng.random_bool(0.3) {
            Relation::Eq
        } else {
            Relation::Le
        };
        base.add_constraint(random_expr(rng, n, -2, 3), rel, ri(rng.random_range(0..=6)));
    }
    let clauses = (0..rng.random_range(1..=3))
        .map(|_| Clause {
            disjuncts: (0..rng.random_range(1..=3))
                .map(|_| {
                    (0..rng.random_range(1..=2))
                        .map(|_| {
                            let rel = match rng.random_range(0..4) {
                                0 => AtomRelation::Le,
                                1 => AtomRelation::Eq,
                                2 => AtomRelation::Ge,
                                _ => AtomRelation::Gt,
                            };
                            Atom::new(random_expr(rng, n, -2, 2), rel, ri(rng.random_range(-2..=3)))
                        })
                        .collect()
                })
                .collect(),
        })
        .collect();
    DisjunctiveProgram { base, clauses }
}

/// Feasibility by trying every combination of disjuncts; strict atoms
/// become `expr >= rhs + t` with the slack `t` maximized.
pub fn exhaustive_disjunctive(dp: &DisjunctiveProgram) -> bool {
    let sizes: Vec<usize> = dp.clauses.iter().map(|c| c.disjuncts.len()).collect();
    let mut pick = vec![0usize; sizes.len()];
    loop {
        let mut lp = dp.base.clone();
        lp.objective = None;
        let t = lp.add_var("slack", VarBound::NonNegative);
        lp.add_constraint(LinExpr::var(t), Relation::Le, ri(1));
        let mut strict = false;
        for (c, &i) in dp.clauses.iter().zip(&pick) {
            for atom in &c.disjuncts[i] {
                let rel = match atom.relation {
                    AtomRelation::Le => Relation::Le,
                    AtomRelation::Eq => Relation::Eq,
                    AtomRelation::Ge => Relation::Ge,
                    AtomRelation::Gt => {
                        strict = true;
                        let mut e = atom.expr.clone();
                        e.add_term(t, &ri(-1));
                        lp.add_constraint(e, Relation::Ge, atom.rhs.clone());
                        continue;
                    }
                };
                lp.add_constraint(atom.expr.clone(), rel, atom.rhs.clone());
            }
        }
        lp.set_objective(LinExpr::var(t), Sense::Maximize);
        if let LpOutcome::Optimal { value, .. } = solve_lp(&lp) {
            if !strict || value.is_positive() {
                return true;
            }
        }
        let mut k = 0;
        loop {
            if k == pick.len() {
                return false;
            }
            pick[k] += 1;
            if pick[k] < sizes[k] {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// Random point of the convex hull of `points` with weights in quarters.
pub fn hull_point(rng: &mut impl Rng, points: &[Vec<Rational>]) -> Vec<Rational> {
    let mut weights: Vec<i64> = points.iter().map(|_| rng.random_range(0..=4)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    let dim = points[0].len();
    (0..dim)
        .map(|k| {
            points
                .iter()
                .zip(&weights)
                .map(|(p, &w)| &p[k] * r(w, total))
                .sum()
        })
        .collect()
}
