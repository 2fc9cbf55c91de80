mod common;

use common::*;
use mpsynth::gen::{random_model, GenParams};
use mpsynth::graph::{is_unichain, mec_decomposition};
use mpsynth::lp::{solve_disjunctive, solve_lp, LpOutcome};
use mpsynth::strategy::{expected_mean_payoffs, product_chain, MemorylessStrategy, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut kinds = [0usize; 4];
    for i in 0..300 {
        let lp = random_lp(&mut rng);
        let got = solve_lp(&lp);
        let want = vertex_oracle(&lp);
        kinds[match want {
            Oracle::Infeasible => 0,
            Oracle::Unbounded => 1,
            Oracle::Feasible => 2,
            Oracle::Optimal(_) => 3,
        }] += 1;
        match (&got, &want) {
            (LpOutcome::Infeasible, Oracle::Infeasible) | (LpOutcome::Unbounded, Oracle::Unbounded) => {}
            (LpOutcome::Feasible(x), Oracle::Feasible) => assert!(lp.is_satisfied_by(x), "lp {i}"),
            (LpOutcome::Optimal { assignment, value }, Oracle::Optimal(v)) => {
                assert!(lp.is_satisfied_by(assignment), "lp {i}");
                assert_eq!(value, v, "lp {i}: {lp:?}");
                assert_eq!(&lp.objective.as_ref().unwrap().expr.eval(assignment), v);
            }
            _ => panic!("lp {i}: simplex {got:?}, oracle {want:?}\n{lp:?}"),
        }
    }
    assert!(kinds.iter().all(|&k| k >= 10), "{kinds:?}");
}

#[test]
fn disjunctive_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut feasible = 0;
    for i in 0..200 {
        let dp = random_dp(&mut rng);
        let got = solve_disjunctive(&dp);
        let want = exhaustive_disjunctive(&dp);
        assert_eq!(got.is_feasible(), want, "dp {i}: {dp:?}");
        if let Some(x) = got.assignment() {
            assert!(dp.is_satisfied_by(x), "dp {i}");
            feasible += 1;
        }
    }
    // the family exercises both outcomes
    assert!(feasible > 20 && feasible < 180, "{feasible}");
}

#[test]
fn mecs_match_subset_enumeration() {
    for seed in 0..300 {
        let m = random_model(seed, GenParams::default());
        let got: Vec<_> = mec_decomposition(&m.mdp)
            .mecs
            .into_iter()
            .map(|ec| (ec.states, ec.actions))
            .collect();
        assert_eq!(got, brute_mecs(&m.mdp), "seed {seed}");
    }
}

#[test]
fn unichain_matches_all_action_subsets() {
    let params = GenParams {
        max_states: 4,
        ..GenParams::default()
    };
    let mut unichain = 0;
    for seed in 0..300 {
        let m = random_model(seed, params);
        let want = brute_unichain(&m.mdp);
        assert_eq!(is_unichain(&m.mdp), want, "seed {seed}");
        unichain += want as usize;
    }
    assert!(unichain > 0);
}

#[test]
fn chain_values_match_library() {
    for seed in 0..200 {
        let m = random_model(seed, GenParams::default());
        let choice: Vec<_> = (0..m.mdp.num_states())
            .map(|s| {
                let en = m.mdp.enabled(s);
                let k = en.len() as i64;
                en.iter().map(|&a| (a, r(1, k))).collect()
            })
            .collect();
        let want = memoryless_values(&m, &choice);
        let st = Strategy::Memoryless(MemorylessStrategy { choice });
        let chain = product_chain(&m.mdp, &st).chain;
        assert_eq!(
            expected_mean_payoffs(&chain, &m.rewards).unwrap(),
            want,
            "seed {seed}"
        );
    }
}
