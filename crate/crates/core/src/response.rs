//! Exact evaluation, best responses by backward induction, and regret.
//!
//! All routines hold the population flows fixed. With `V_{T+1} = 0`,
//!
//! ```text
//! Q_t(x, a) = r(x, a, mu_t) + sum_y p(y | x, a) V_{t+1}(y)
//! V_t(x)    = sum_a s_t(a | x) Q_t(x, a)      (evaluation)
//! V_t(x)    = max_a Q_t(x, a)                 (best response)
//! ```
//!
//! and a strategy's utility is `sum_x mu_0(x) V_0(x)` under the population's
//! own initial distribution.

use serde::{Deserialize, Serialize};

use crate::concurrency::Concurrency;
use crate::error::{MfgError, Result};
use crate::model::{mean_field_at, Flow, MixedStrategy, Strategy, TabularMfg, TransitionKernel};
use crate::scalar::Scalar;
use crate::solvers::EmpiricalGame;

/// Backward value function `V_t(x)` for `t in 0..=horizon + 1`, with the
/// last slice identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable<T> {
    horizon: usize,
    n_states: usize,
    values: Vec<T>,
}

impl<T: Scalar> ValueTable<T> {
    fn zeros(horizon: usize, n_states: usize) -> Self {
        Self {
            horizon,
            n_states,
            values: vec![T::zero(); (horizon + 2) * n_states],
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn at(&self, t: usize) -> &[T] {
        &self.values[t * self.n_states..(t + 1) * self.n_states]
    }

    fn at_mut(&mut self, t: usize) -> &mut [T] {
        &mut self.values[t * self.n_states..(t + 1) * self.n_states]
    }

    /// `sum_x mu_0(x) V_0(x)`.
    pub fn expected(&self, initial: &[T]) -> T {
        dot(initial, self.at(0))
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Immediate rewards `r_pop(x, a, mu_t)` for every `(t, x, a)`, flattened.
pub fn reward_table<T: Scalar>(game: &TabularMfg<T>, pop: usize, flows: &[Flow<T>]) -> Result<Vec<T>> {
    game.check_population(pop)?;
    game.check_flows(flows)?;
    let (n, na) = (game.n_states(), game.n_actions());
    let mut table = Vec::with_capacity((game.horizon() + 1) * n * na);
    for t in 0..=game.horizon() {
        let mf = mean_field_at(flows, t);
        for x in 0..n {
            for a in 0..na {
                table.push(game.reward(pop, x, a, &mf)?);
            }
        }
    }
    Ok(table)
}

fn continuation<T: Scalar>(kernel: &TransitionKernel<T>, x: usize, a: usize, next: &[T]) -> T {
    kernel
        .successors(x, a)
        .iter()
        .fold(T::zero(), |acc, &(y, p)| acc + p * next[y])
}

pub(crate) fn values_from_rewards<T: Scalar>(
    strategy: &Strategy<T>,
    rewards: &[T],
    kernel: &TransitionKernel<T>,
) -> ValueTable<T> {
    let (horizon, n, na) = (strategy.horizon(), strategy.n_states(), strategy.n_actions());
    let mut v = ValueTable::zeros(horizon, n);
    for t in (0..=horizon).rev() {
        let mut cur = vec![T::zero(); n];
        {
            let next = v.at(t + 1);
            for (x, out) in cur.iter_mut().enumerate() {
                let row = strategy.row(t, x);
                let r = &rewards[(t * n + x) * na..(t * n + x + 1) * na];
                *out = (0..na)
                    .filter(|&a| row[a] != T::zero())
                    .fold(T::zero(), |acc, a| {
                        acc + row[a] * (r[a] + continuation(kernel, x, a, next))
                    });
            }
        }
        v.at_mut(t).copy_from_slice(&cur);
    }
    v
}

/// Value table of `strategy` for population `pop` against fixed `flows`.
pub fn value_table<T: Scalar>(
    strategy: &Strategy<T>,
    flows: &[Flow<T>],
    pop: usize,
    game: &TabularMfg<T>,
) -> Result<ValueTable<T>> {
    game.check_strategy(strategy)?;
    let rewards = reward_table(game, pop, flows)?;
    Ok(values_from_rewards(strategy, &rewards, game.kernel()))
}

/// Expected total reward `u_pop(s, mu)` summed over `t in 0..=horizon`.
pub fn evaluate<T: Scalar>(
    strategy: &Strategy<T>,
    flows: &[Flow<T>],
    pop: usize,
    game: &TabularMfg<T>,
) -> Result<T> {
    Ok(value_table(strategy, flows, pop, game)?.expected(game.initial_dist(pop)))
}

/// Utility of a mixture at fixed flows: `sum_k w_k u(s_k, mu)`.
pub fn evaluate_mixed<T: Scalar>(
    mixed: &MixedStrategy<T>,
    strategies: &[Strategy<T>],
    flows: &[Flow<T>],
    pop: usize,
    game: &TabularMfg<T>,
) -> Result<T> {
    if mixed.len() != strategies.len() {
        return Err(MfgError::Shape {
            what: "mixture weights",
            expected: strategies.len(),
            got: mixed.len(),
        });
    }
    let rewards = reward_table(game, pop, flows)?;
    let init = game.initial_dist(pop);
    let mut total = T::zero();
    for (s, &w) in strategies.iter().zip(mixed.weights()) {
        game.check_strategy(s)?;
        if w == T::zero() {
            continue;
        }
        total = total + w * values_from_rewards(s, &rewards, game.kernel()).expected(init);
    }
    Ok(total)
}

/// Deterministic best response with its value and value table.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse<T> {
    pub strategy: Strategy<T>,
    pub value: T,
    pub values: ValueTable<T>,
}

pub(crate) fn best_response_from_rewards<T: Scalar>(
    game: &TabularMfg<T>,
    pop: usize,
    rewards: &[T],
) -> BestResponse<T> {
    let (horizon, n, na) = (game.horizon(), game.n_states(), game.n_actions());
    let kernel = game.kernel();
    let mut v = ValueTable::zeros(horizon, n);
    let mut choices = vec![0usize; (horizon + 1) * n];
    for t in (0..=horizon).rev() {
        let mut cur = vec![T::zero(); n];
        {
            let next = v.at(t + 1);
            for (x, out) in cur.iter_mut().enumerate() {
                let r = &rewards[(t * n + x) * na..(t * n + x + 1) * na];
                let mut best = r[0] + continuation(kernel, x, 0, next);
                let mut arg = 0;
                for (a, &ra) in r.iter().enumerate().skip(1) {
                    let q = ra + continuation(kernel, x, a, next);
                    // strict: ties keep the lowest action index
                    if q > best {
                        best = q;
                        arg = a;
                    }
                }
                *out = best;
                choices[t * n + x] = arg;
            }
        }
        v.at_mut(t).copy_from_slice(&cur);
    }
    let mut tables = vec![T::zero(); (horizon + 1) * n * na];
    for (cell, &a) in choices.iter().enumerate() {
        tables[cell * na + a] = T::one();
    }
    BestResponse {
        strategy: Strategy::from_raw(horizon, n, na, tables),
        value: v.expected(game.initial_dist(pop)),
        values: v,
    }
}

/// Exact best response of population `pop` to fixed `flows`.
pub fn best_response<T: Scalar>(
    flows: &[Flow<T>],
    pop: usize,
    game: &TabularMfg<T>,
) -> Result<BestResponse<T>> {
    let rewards = reward_table(game, pop, flows)?;
    Ok(best_response_from_rewards(game, pop, &rewards))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationRegret<T> {
    pub best_response_value: T,
    pub current_value: T,
    pub regret: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport<T> {
    pub per_population: Vec<PopulationRegret<T>>,
    pub total: T,
}

impl<T: Scalar> RegretReport<T> {
    /// Clamps `br - current` at zero; a gap below `-T::CONSISTENCY_TOL` is an error.
    pub fn from_values(values: &[(T, T)]) -> Result<Self> {
        let tol = T::lit(T::CONSISTENCY_TOL);
        let mut per_population = Vec::with_capacity(values.len());
        for (pop, &(br, cur)) in values.iter().enumerate() {
            let gap = br - cur;
            if gap < -tol {
                return Err(MfgError::Dominance {
                    pop,
                    br: br.as_f64(),
                    current: cur.as_f64(),
                });
            }
            per_population.push(PopulationRegret {
                best_response_value: br,
                current_value: cur,
                regret: gap.max(T::zero()),
            });
        }
        let total = per_population
            .iter()
            .fold(T::zero(), |acc, p| acc + p.regret);
        Ok(Self {
            per_population,
            total,
        })
    }

    pub fn regrets(&self) -> Vec<T> {
        self.per_population.iter().map(|p| p.regret).collect()
    }
}

/// Sum over populations of the gain from a unilateral deviation, evaluated
/// at the flows the profile induces.
pub fn exploitability<T: Scalar>(
    mixed: &[MixedStrategy<T>],
    empirical: &EmpiricalGame<T>,
    game: &TabularMfg<T>,
) -> Result<RegretReport<T>> {
    exploitability_with(mixed, empirical, game, &Concurrency::default())
}

pub fn exploitability_with<T: Scalar>(
    mixed: &[MixedStrategy<T>],
    empirical: &EmpiricalGame<T>,
    game: &TabularMfg<T>,
    concurrency: &Concurrency,
) -> Result<RegretReport<T>> {
    let (_, flows) = empirical.induced(game, mixed)?;
    let values = concurrency.map(game.n_populations(), |pop| -> Result<(T, T)> {
        let rewards = reward_table(game, pop, &flows)?;
        let br = best_response_from_rewards(game, pop, &rewards).value;
        let cur = evaluate_mixed(&mixed[pop], empirical.strategies(pop), &flows, pop, game)?;
        Ok((br, cur))
    });
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    RegretReport::from_values(&values)
}

/// Single-population payoff matrix `M[j][k] = u(s_j, mu^{s_k})`.
pub fn payoff_matrix<T: Scalar>(empirical: &EmpiricalGame<T>, game: &TabularMfg<T>) -> Result<Vec<Vec<T>>> {
    if game.n_populations() != 1 || empirical.n_populations() != 1 {
        return Err(MfgError::Config(
            "payoff matrix is defined for single-population games only".into(),
        ));
    }
    let strategies = empirical.strategies(0);
    let mut m = vec![Vec::with_capacity(strategies.len()); strategies.len()];
    for flow in empirical.flows(0) {
        let rewards = reward_table(game, 0, std::slice::from_ref(flow))?;
        for (j, s) in strategies.iter().enumerate() {
            m[j].push(values_from_rewards(s, &rewards, game.kernel()).expected(game.initial_dist(0)));
        }
    }
    Ok(m)
}
