//! Seeded game generators and brute-force oracles shared by the integration tests.
//!
//! The oracles use only plain loops over the raw tables; they never call the
//! library's propagation, evaluation or best-response routines.

#![allow(dead_code)]

use std::sync::Arc;

use mfg_egta::environments::{build_custom, FnReward};
use mfg_egta::model::mean_field_at;
use mfg_egta::{Flow, Game, Strategy, TransitionKernel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

pub fn random_kernel(rng: &mut ChaCha8Rng, n: usize, na: usize) -> TransitionKernel {
    TransitionKernel::from_fn(n, na, |_, _| {
        // some rows sparse so zero-probability successors are exercised
        if rng.gen_bool(0.3) {
            let mut row = vec![0.0; n];
            row[rng.gen_range(0..n)] = 1.0;
            row
        } else {
            random_simplex(rng, n)
        }
    })
    .unwrap()
}

/// Game with `n_pops` populations whose reward couples to every population's
/// mean field: `base[pop][x][a] + sum_j c[pop][j] * mu_j(x)`.
pub fn random_game(seed: u64, max_states: usize, max_actions: usize, max_horizon: usize, n_pops: usize) -> Game {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_states);
    let na = r.gen_range(1..=max_actions);
    let h = r.gen_range(0..=max_horizon);
    let kernel = random_kernel(&mut r, n, na);
    let base: Vec<f64> = (0..n_pops * n * na).map(|_| r.gen_range(-1.0..1.0)).collect();
    let coupling: Vec<f64> = (0..n_pops * n_pops).map(|_| r.gen_range(-1.0..1.0)).collect();
    let reward = FnReward(move |pop: usize, x: usize, a: usize, mf: &[&[f64]]| -> Result<f64, String> {
        let crowd: f64 = (0..mf.len()).map(|j| coupling[pop * mf.len() + j] * mf[j][x]).sum();
        Ok(base[(pop * n + x) * na + a] + crowd)
    });
    let init = (0..n_pops).map(|_| random_simplex(&mut r, n)).collect();
    build_custom(n_pops, kernel, Arc::new(reward), h, init).unwrap()
}

/// Single-population family with weak own-state coupling used by the
/// termination and certificate checks: |X| in {2,3}, |A| = 2, T in {1,2}.
pub fn weakly_coupled_game(seed: u64) -> Game {
    let mut r = rng(seed);
    let n = r.gen_range(2..=3);
    let na = 2;
    let h = r.gen_range(1..=2);
    let kernel = TransitionKernel::from_fn(n, na, |_, _| random_simplex(&mut r, n)).unwrap();
    let base: Vec<f64> = (0..n * na).map(|_| r.gen()).collect();
    let c: f64 = r.gen_range(-1.0..1.0);
    let reward = FnReward(move |_: usize, x: usize, a: usize, mf: &[&[f64]]| -> Result<f64, String> { Ok(base[x * na + a] + c * mf[0][x]) });
    build_custom(1, kernel, Arc::new(reward), h, vec![vec![1.0 / n as f64; n]]).unwrap()
}

/// Arbitrary flows (not necessarily induced by any strategy).
pub fn random_flows(game: &Game, r: &mut ChaCha8Rng) -> Vec<Flow> {
    (0..game.n_populations())
        .map(|_| {
            let d = (0..=game.horizon())
                .flat_map(|_| random_simplex(r, game.n_states()))
                .collect();
            Flow::new(game.horizon(), game.n_states(), d).unwrap()
        })
        .collect()
}

/// Forward pass with explicit loops: own-state distribution at every t.
pub fn oracle_flow(game: &Game, s: &Strategy, init: &[f64]) -> Vec<Vec<f64>> {
    let n = game.n_states();
    let mut out = vec![init.to_vec()];
    for t in 0..game.horizon() {
        let mut next = vec![0.0; n];
        for x in 0..n {
            for a in 0..game.n_actions() {
                for y in 0..n {
                    next[y] += out[t][x] * s.prob(t, x, a) * game.kernel().prob(x, a, y);
                }
            }
        }
        out.push(next);
    }
    out
}

/// Expected total reward by summing over every (x_0, a_0, ..., x_T, a_T) path.
pub fn oracle_value_by_paths(game: &Game, s: &Strategy, flows: &[Flow], pop: usize) -> f64 {
    fn walk(game: &Game, s: &Strategy, flows: &[Flow], pop: usize, t: usize, x: usize, prob: f64, acc: f64) -> f64 {
        let mut total = 0.0;
        let mf = mean_field_at(flows, t);
        for a in 0..game.n_actions() {
            let pa = prob * s.prob(t, x, a);
            if pa == 0.0 {
                continue;
            }
            let r = acc + game.reward(pop, x, a, &mf).unwrap();
            if t == game.horizon() {
                total += pa * r;
            } else {
                for y in 0..game.n_states() {
                    let p = game.kernel().prob(x, a, y);
                    if p > 0.0 {
                        total += walk(game, s, flows, pop, t + 1, y, pa * p, r);
                    }
                }
            }
        }
        total
    }
    (0..game.n_states())
        .map(|x| walk(game, s, flows, pop, 0, x, game.initial_dist(pop)[x], 0.0))
        .sum()
}

/// Expected total reward via the own-state distribution: `sum_t sum_x rho_t(x) sum_a s r`.
pub fn oracle_value(game: &Game, s: &Strategy, flows: &[Flow], pop: usize) -> f64 {
    let rho = oracle_flow(game, s, game.initial_dist(pop));
    let mut v = 0.0;
    for t in 0..=game.horizon() {
        let mf = mean_field_at(flows, t);
        for x in 0..game.n_states() {
            for a in 0..game.n_actions() {
                v += rho[t][x] * s.prob(t, x, a) * game.reward(pop, x, a, &mf).unwrap();
            }
        }
    }
    v
}

/// Every deterministic strategy of the game, `|A|^((T+1)|X|)` of them.
pub fn all_deterministic(game: &Game) -> Vec<Strategy> {
    let slots = (game.horizon() + 1) * game.n_states();
    let na = game.n_actions();
    let count = na.pow(slots as u32);
    (0..count)
        .map(|mut code| {
            let choices: Vec<usize> = (0..slots)
                .map(|_| {
                    let c = code % na;
                    code /= na;
                    c
                })
                .collect();
            Strategy::deterministic(game.horizon(), game.n_states(), na, &choices).unwrap()
        })
        .collect()
}

/// Best achievable value by exhaustive search over deterministic strategies.
pub fn oracle_best_value(game: &Game, flows: &[Flow], pop: usize) -> f64 {
    all_deterministic(game)
        .iter()
        .map(|s| oracle_value(game, s, flows, pop))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Every slice of `flow` sums to one within `tol`.
pub fn mass_conserved(flow: &Flow, tol: f64) -> bool {
    (0..=flow.horizon()).all(|t| (flow.dist(t).iter().sum::<f64>() - 1.0).abs() <= tol)
}
