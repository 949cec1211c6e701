mod common;

use std::sync::Arc;

use common::*;
use mfg_egta::environments::{build_beach_bar_1d, build_chasing, build_custom, BeachBar1dConfig, ChasingConfig, FnReward};
use mfg_egta::solvers::{initial_strategies, restricted_fp_traced, EmpiricalGame};
use mfg_egta::{
    best_response, evaluate, exploitability, full_fp, iterative_egta, payoff_matrix, propagate_flow, restricted_fp,
    Concurrency, FpConfig, Game, InitialPolicy, Strategy, TransitionKernel,
};

/// Action 1 is worth 1 more than action 0 in every state, whatever the crowd does.
fn dominant_action_game() -> Game {
    let kernel = TransitionKernel::from_fn(3, 2, |x, a| {
        let mut row = vec![0.0; 3];
        row[(x + a) % 3] = 1.0;
        row
    })
    .unwrap();
    let reward = FnReward(|_, _, a: usize, _: &[&[f64]]| -> Result<f64, String> { Ok(a as f64) });
    build_custom(1, kernel, Arc::new(reward), 2, vec![vec![1.0 / 3.0; 3]]).unwrap()
}

fn beach(n: usize, h: usize) -> Game {
    build_beach_bar_1d(&BeachBar1dConfig::new(n, h)).unwrap()
}

#[test]
fn unit_prior_counts_give_quarter_three_quarters() {
    let game = dominant_action_game();
    let bad = Strategy::deterministic(2, 3, 2, &[0; 9]).unwrap();
    let good = Strategy::deterministic(2, 3, 2, &[1; 9]).unwrap();
    let emp = EmpiricalGame::from_sets(&game, vec![vec![bad, good]]).unwrap();
    let cfg = FpConfig {
        prior_count: 1,
        ..FpConfig::default()
    };
    let sol = restricted_fp_traced(&emp, &game, &cfg).unwrap();
    assert_eq!(sol.history[0][0].weights(), &[1.0 / 3.0, 2.0 / 3.0]);
    assert_eq!(sol.history[1][0].weights(), &[0.25, 0.75]);
}

#[test]
fn singleton_sets_return_immediately() {
    let game = beach(6, 4);
    let s = initial_strategies(&game, InitialPolicy::Random, 8).remove(0);
    let emp = EmpiricalGame::new(&game, vec![s.clone()]).unwrap();
    let sol = restricted_fp(&emp, &game, &FpConfig::default()).unwrap();
    assert_eq!(sol.iterations, 0);
    assert_eq!(sol.mixtures[0].weights(), &[1.0]);
    let direct = propagate_flow(&s, game.initial_dist(0), game.kernel()).unwrap();
    for (a, b) in sol.flows[0].dists().iter().zip(direct.dists()) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn restricted_weights_are_simplices_with_bounded_steps() {
    for seed in 0..10 {
        let game = random_game(seed, 4, 3, 3, 2);
        let mut r = rng(seed);
        let (h, n, na) = (game.horizon(), game.n_states(), game.n_actions());
        let sets = (0..2)
            .map(|_| (0..3).map(|_| Strategy::random(h, n, na, &mut r)).collect())
            .collect();
        let emp = EmpiricalGame::from_sets(&game, sets).unwrap();
        for prior in [0, 1] {
            let cfg = FpConfig {
                prior_count: prior,
                max_inner_iters: 50,
                stop_tol: 1e-12,
            };
            let sol = restricted_fp_traced(&emp, &game, &cfg).unwrap();
            let mut prev = vec![vec![1.0 / 3.0; 3]; 2];
            for (j, step) in sol.history.iter().enumerate() {
                for (pop, m) in step.iter().enumerate() {
                    let w = m.weights();
                    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    assert!(w.iter().all(|&p| p >= 0.0));
                    if prior == 1 {
                        let bound = 1.0 / (3.0 + (j + 1) as f64);
                        for (a, b) in w.iter().zip(&prev[pop]) {
                            assert!((a - b).abs() <= bound + 1e-15);
                        }
                    }
                    prev[pop] = w.to_vec();
                }
            }
            for f in &sol.flows {
                assert!(mass_conserved(f, 1e-12));
            }
        }
    }
}

#[test]
fn dominant_action_game_is_certified_at_second_iteration() {
    let game = dominant_action_game();
    let initial = initial_strategies(&game, InitialPolicy::Random, 1);
    let out = iterative_egta(&game, initial, 10, &FpConfig::default(), 0.0, &Concurrency::sequential()).unwrap();
    assert!(out.certificate.terminated_by_no_deviation);
    assert_eq!(out.certificate.iteration, Some(2));
    assert!(out.trace.records[0].total > 0.0);
    let report = exploitability(&out.mixtures, &out.empirical, &game).unwrap();
    assert!(report.total.abs() < 1e-12);
}

#[test]
fn certificates_hold_up_under_independent_exploitability() {
    for seed in 0..20 {
        let game = weakly_coupled_game(seed);
        let initial = initial_strategies(&game, InitialPolicy::Random, seed);
        let eps = 1e-6;
        let out = iterative_egta(&game, initial, 50, &FpConfig::default(), eps, &Concurrency::sequential()).unwrap();
        assert!(out.certificate.terminated_by_no_deviation, "seed {seed}");
        let report = exploitability(&out.mixtures, &out.empirical, &game).unwrap();
        assert!(report.total <= eps + 1e-9, "seed {seed}: {}", report.total);
    }
}

#[test]
fn strategy_sets_grow_by_at_most_one_and_stay_coherent() {
    let game = beach(6, 5);
    let run = |iters| {
        let initial = initial_strategies(&game, InitialPolicy::Random, 4);
        iterative_egta(&game, initial, iters, &FpConfig::default(), 0.0, &Concurrency::sequential()).unwrap()
    };
    let mut prev = 1;
    for iters in 1..=12 {
        let out = run(iters);
        let len = out.empirical.len(0);
        assert!(len == prev || len == prev + 1, "iteration {iters}: {prev} -> {len}");
        assert!(out.empirical.is_coherent(&game));
        prev = len;
    }
}

#[test]
fn zero_tolerance_terminates_on_smallest_games() {
    let mut checked = 0;
    for seed in 0..200 {
        let game = weakly_coupled_game(seed);
        if game.n_states() != 2 || game.horizon() != 1 {
            continue;
        }
        checked += 1;
        let initial = initial_strategies(&game, InitialPolicy::Random, seed);
        let out = iterative_egta(&game, initial, 17, &FpConfig::default(), 0.0, &Concurrency::sequential()).unwrap();
        assert!(out.certificate.terminated_by_no_deviation, "seed {seed}");
        assert!(out.empirical.len(0) <= 17);
        if checked == 20 {
            break;
        }
    }
    assert_eq!(checked, 20);
}

#[test]
fn egta_trace_on_beach_bar() {
    let game = beach(10, 10);
    let initial = initial_strategies(&game, InitialPolicy::Random, 0);
    let out = iterative_egta(&game, initial, 30, &FpConfig::default(), 0.0, &Concurrency::sequential()).unwrap();
    assert_eq!(out.trace.len(), 30);
    assert!(out.trace.records[0].total > 0.0);
    let iters: Vec<usize> = out.trace.records.iter().map(|r| r.iteration).collect();
    assert_eq!(iters, (1..=30).collect::<Vec<_>>());
    assert!(!out.certificate.terminated_by_no_deviation);
}

#[test]
fn full_fp_first_iterate_is_the_best_response() {
    let game = beach(8, 6);
    let initial = initial_strategies(&game, InitialPolicy::Random, 2);
    let flow = propagate_flow(&initial[0], game.initial_dist(0), game.kernel()).unwrap();
    let br = best_response(&[flow], 0, &game).unwrap();
    let out = full_fp(&game, initial, 1, 1, &Concurrency::sequential()).unwrap();
    assert_eq!(out.history.strategies(0), &[br.strategy]);
    assert_eq!(out.mixtures[0].weights(), &[1.0]);
}

#[test]
fn full_fp_improves_on_beach_bar() {
    let game = beach(10, 10);
    let initial = initial_strategies(&game, InitialPolicy::Random, 0);
    let out = full_fp(&game, initial, 30, 1, &Concurrency::sequential()).unwrap();
    let totals = out.trace.totals();
    assert_eq!(totals.len(), 30);
    assert!(totals.iter().all(|t| t.is_finite() && *t >= 0.0));
    assert!(totals[29] < totals[0]);
    let weights = out.mixtures[0].weights();
    assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert_eq!(out.history.counts(0).iter().sum::<u64>(), 30);
}

#[test]
fn record_every_thins_the_trace() {
    let game = beach(6, 4);
    let initial = initial_strategies(&game, InitialPolicy::Random, 0);
    let out = full_fp(&game, initial, 10, 4, &Concurrency::sequential()).unwrap();
    let iters: Vec<usize> = out.trace.records.iter().map(|r| r.iteration).collect();
    assert_eq!(iters, vec![4, 8, 10]);
}

#[test]
fn solvers_are_deterministic_and_thread_count_invariant() {
    let cfg = ChasingConfig {
        width: 4,
        height: 4,
        horizon: 5,
        ..ChasingConfig::default()
    };
    let game: Game = build_chasing(&cfg).unwrap();
    let run = |conc: Concurrency| {
        let initial = initial_strategies(&game, InitialPolicy::Random, 21);
        let egta = iterative_egta(&game, initial.clone(), 6, &FpConfig::default(), 0.0, &conc).unwrap();
        let fp = full_fp(&game, initial, 6, 1, &conc).unwrap();
        let regrets = |t: &mfg_egta::SolveTrace| t.records.iter().map(|r| r.regrets.clone()).collect::<Vec<_>>();
        (regrets(&egta.trace), regrets(&fp.trace), egta.mixtures, fp.mixtures)
    };
    let a = run(Concurrency::sequential());
    let b = run(Concurrency::sequential());
    let c = run(Concurrency::with_threads(3));
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(a.0.iter().all(|r| r.len() == 3));
}

#[test]
fn payoff_matrix_entries_are_cross_evaluations() {
    let game = beach(5, 3);
    let mut r = rng(6);
    let members: Vec<Strategy> = (0..2).map(|_| Strategy::random(3, 5, 3, &mut r)).collect();
    let emp = EmpiricalGame::from_sets(&game, vec![members.clone()]).unwrap();
    let m = payoff_matrix(&emp, &game).unwrap();
    for (j, sj) in members.iter().enumerate() {
        for (k, sk) in members.iter().enumerate() {
            let flow = propagate_flow(sk, game.initial_dist(0), game.kernel()).unwrap();
            assert_eq!(m[j][k], evaluate(sj, &[flow], 0, &game).unwrap());
        }
    }
    let single = EmpiricalGame::new(&game, vec![members[0].clone()]).unwrap();
    assert_eq!(payoff_matrix(&single, &game).unwrap().len(), 1);
    let chasing: Game = build_chasing(&ChasingConfig::default()).unwrap();
    let init = initial_strategies(&chasing, InitialPolicy::Uniform, 0);
    let emp = EmpiricalGame::new(&chasing, init).unwrap();
    assert!(payoff_matrix(&emp, &chasing).is_err());
}
