//! Fictitious play on an empirical game, without an explicit payoff matrix.

use serde::{Deserialize, Serialize};

use super::EmpiricalGame;
use crate::error::{MfgError, Result};
use crate::model::{Flow, MixedStrategy, Strategy, TabularMfg};
use crate::response::reward_table;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FpConfig {
    /// Inner iteration budget `J`.
    #[serde(default = "default_inner_iters")]
    pub max_inner_iters: usize,
    /// Stop once no mixture weight moves by this much in one iteration.
    #[serde(default = "default_stop_tol")]
    pub stop_tol: f64,
    /// Pseudo-count added to every member: weights are
    /// `(prior + n_k) / (prior * |Lambda| + sum n)`. Zero gives plain
    /// best-response frequencies after the first iteration.
    #[serde(default)]
    pub prior_count: u32,
}

fn default_inner_iters() -> usize {
    200
}

fn default_stop_tol() -> f64 {
    1e-4
}

impl Default for FpConfig {
    fn default() -> Self {
        Self {
            max_inner_iters: default_inner_iters(),
            stop_tol: default_stop_tol(),
            prior_count: 0,
        }
    }
}

impl FpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_inner_iters == 0 {
            return Err(MfgError::Config("max_inner_iters must be >= 1".into()));
        }
        if self.stop_tol.is_nan() || self.stop_tol <= 0.0 {
            return Err(MfgError::Config("stop_tol must be > 0".into()));
        }
        Ok(())
    }
}

/// Output of [`restricted_fp`].
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedSolution<T> {
    pub mixtures: Vec<MixedStrategy<T>>,
    /// Aggregated behavioral strategy of each mixture.
    pub strategies: Vec<Strategy<T>>,
    /// Flows induced by `strategies`.
    pub flows: Vec<Flow<T>>,
    pub counts: Vec<Vec<u64>>,
    pub iterations: usize,
    /// Mixture after every inner iteration, when requested.
    pub history: Vec<Vec<MixedStrategy<T>>>,
}

fn fp_weights<T: Scalar>(counts: &[u64], prior: u32) -> Vec<T> {
    let prior = T::from_u32(prior).unwrap();
    let total: u64 = counts.iter().sum();
    let denom = prior * T::from_usize(counts.len()).unwrap() + T::from_u64(total).unwrap();
    counts
        .iter()
        .map(|&n| (prior + T::from_u64(n).unwrap()) / denom)
        .collect()
}

/// Index of the largest utility; ties keep the lowest index.
pub(crate) fn argmax<T: Scalar>(values: impl IntoIterator<Item = T>) -> (usize, T) {
    let mut it = values.into_iter().enumerate();
    let (mut arg, mut best) = it.next().expect("argmax over an empty set");
    for (k, v) in it {
        if v > best {
            best = v;
            arg = k;
        }
    }
    (arg, best)
}

pub(crate) fn occupancy_utility<T: Scalar>(occupancy: &[T], rewards: &[T]) -> T {
    occupancy
        .iter()
        .zip(rewards)
        .fold(T::zero(), |acc, (&o, &r)| acc + o * r)
}

/// Restricted fictitious play over every population's `Lambda_i`.
///
/// Starts from the uniform mixture; each iteration best responds within
/// `Lambda_i` to the flows of the current aggregated mixtures, bumps that
/// member's count and reweights.
pub fn restricted_fp<T: Scalar>(
    empirical: &EmpiricalGame<T>,
    game: &TabularMfg<T>,
    cfg: &FpConfig,
) -> Result<RestrictedSolution<T>> {
    run(empirical, game, cfg, false)
}

/// As [`restricted_fp`], also returning the mixture after every iteration.
pub fn restricted_fp_traced<T: Scalar>(
    empirical: &EmpiricalGame<T>,
    game: &TabularMfg<T>,
    cfg: &FpConfig,
) -> Result<RestrictedSolution<T>> {
    run(empirical, game, cfg, true)
}

fn run<T: Scalar>(
    empirical: &EmpiricalGame<T>,
    game: &TabularMfg<T>,
    cfg: &FpConfig,
    keep_history: bool,
) -> Result<RestrictedSolution<T>> {
    cfg.validate()?;
    let n_pops = game.n_populations();
    if empirical.n_populations() != n_pops {
        return Err(MfgError::Shape {
            what: "empirical game populations",
            expected: n_pops,
            got: empirical.n_populations(),
        });
    }
    for pop in 0..n_pops {
        if empirical.is_empty(pop) {
            return Err(MfgError::EmptyStrategySet(pop));
        }
    }
    let mut mixtures: Vec<MixedStrategy<T>> = (0..n_pops)
        .map(|pop| MixedStrategy::uniform(empirical.len(pop)))
        .collect();
    let mut counts: Vec<Vec<u64>> = (0..n_pops).map(|pop| vec![0; empirical.len(pop)]).collect();
    let mut history = Vec::new();
    let (mut strategies, mut flows) = empirical.induced(game, &mixtures)?;
    let mut iterations = 0;
    let stop_tol = T::lit(cfg.stop_tol);

    if (0..n_pops).any(|pop| empirical.len(pop) > 1) {
        for _ in 0..cfg.max_inner_iters {
            iterations += 1;
            let mut max_change = T::zero();
            for pop in 0..n_pops {
                let rewards = reward_table(game, pop, &flows)?;
                let (br, _) = argmax(
                    empirical
                        .occupancies(pop)
                        .iter()
                        .map(|occ| occupancy_utility(occ, &rewards)),
                );
                counts[pop][br] += 1;
                let weights = fp_weights::<T>(&counts[pop], cfg.prior_count);
                for (&new, &old) in weights.iter().zip(mixtures[pop].weights()) {
                    max_change = max_change.max((new - old).abs());
                }
                mixtures[pop] = MixedStrategy::from_raw(weights);
            }
            (strategies, flows) = empirical.induced(game, &mixtures)?;
            if keep_history {
                history.push(mixtures.clone());
            }
            if max_change < stop_tol {
                break;
            }
        }
    }
    Ok(RestrictedSolution {
        mixtures,
        strategies,
        flows,
        counts,
        iterations,
        history,
    })
}
