use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::log_floor;
use crate::error::{MfgError, Result};
use crate::model::{ActionSet, Reward, StateSpace, TabularMfg, TransitionKernel};
use crate::scalar::Scalar;

/// Assembles a game over an abstract state space with actions `a0, a1, ...`.
pub fn build_custom<T: Scalar>(
    n_populations: usize,
    kernel: TransitionKernel<T>,
    reward: Arc<dyn Reward<T>>,
    horizon: usize,
    initial_dists: Vec<Vec<T>>,
) -> Result<TabularMfg<T>> {
    TabularMfg::new(
        n_populations,
        StateSpace::abstract_space(kernel.n_states())?,
        ActionSet::indexed(kernel.n_actions())?,
        kernel,
        reward,
        horizon,
        initial_dists,
    )
}

/// Adapts a closure `(pop, x, a, mean_field) -> Result<r, message>` into a [`Reward`].
pub struct FnReward<F>(pub F);

impl<F> fmt::Debug for FnReward<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnReward(..)")
    }
}

impl<T, F> Reward<T> for FnReward<F>
where
    F: Fn(usize, usize, usize, &[&[T]]) -> std::result::Result<T, String> + Send + Sync,
{
    fn reward(
        &self,
        pop: usize,
        state: usize,
        action: usize,
        mean_field: &[&[T]],
    ) -> std::result::Result<T, String> {
        (self.0)(pop, state, action, mean_field)
    }
}

/// Tabulated `base[pop][x][a]` plus an optional crowd-aversion term
/// `-crowd_aversion * log(max(mu_pop(x), floor))`.
#[derive(Debug, Clone)]
pub struct TableReward<T> {
    n_states: usize,
    n_actions: usize,
    base: Vec<T>,
    crowd_aversion: T,
}

impl<T: Scalar> TableReward<T> {
    pub fn new(
        n_populations: usize,
        n_states: usize,
        n_actions: usize,
        base: Vec<T>,
        crowd_aversion: T,
    ) -> Result<Self> {
        let expected = n_populations * n_states * n_actions;
        if base.len() != expected {
            return Err(MfgError::Shape {
                what: "reward table",
                expected,
                got: base.len(),
            });
        }
        Ok(Self {
            n_states,
            n_actions,
            base,
            crowd_aversion,
        })
    }
}

impl<T: Scalar> Reward<T> for TableReward<T> {
    fn reward(
        &self,
        pop: usize,
        state: usize,
        action: usize,
        mean_field: &[&[T]],
    ) -> std::result::Result<T, String> {
        let idx = (pop * self.n_states + state) * self.n_actions + action;
        let base = *self
            .base
            .get(idx)
            .ok_or_else(|| format!("no reward entry for population {pop}"))?;
        if self.crowd_aversion == T::zero() {
            return Ok(base);
        }
        let mu = mean_field
            .get(pop)
            .ok_or_else(|| format!("no distribution for population {pop}"))?;
        Ok(base - self.crowd_aversion * log_floor(mu[state]))
    }
}

/// Config-file form of a hand-specified game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomConfig {
    pub horizon: usize,
    /// `kernel[x][a][x']`.
    pub kernel: Vec<Vec<Vec<f64>>>,
    /// `rewards[pop][x][a]`.
    pub rewards: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub crowd_aversion: f64,
    /// One distribution per population.
    pub initial_dists: Vec<Vec<f64>>,
}

impl CustomConfig {
    pub fn build<T: Scalar>(&self) -> Result<TabularMfg<T>> {
        let n = self.kernel.len();
        let na = self.kernel.first().map_or(0, Vec::len);
        if n == 0 || na == 0 {
            return Err(MfgError::Config("custom kernel must be non-empty".into()));
        }
        let kernel = TransitionKernel::from_fn(n, na, |x, a| {
            self.kernel[x]
                .get(a)
                .map(|row| row.iter().map(|&p| T::lit(p)).collect())
                .unwrap_or_default()
        })?;
        let n_pops = self.rewards.len();
        let mut base = Vec::with_capacity(n_pops * n * na);
        for (pop, table) in self.rewards.iter().enumerate() {
            if table.len() != n || table.iter().any(|r| r.len() != na) {
                return Err(MfgError::Config(format!(
                    "rewards[{pop}] must be {n} x {na}"
                )));
            }
            base.extend(table.iter().flatten().map(|&r| T::lit(r)));
        }
        let reward = TableReward::new(n_pops, n, na, base, T::lit(self.crowd_aversion))?;
        build_custom(
            n_pops,
            kernel,
            Arc::new(reward),
            self.horizon,
            self.initial_dists
                .iter()
                .map(|d| d.iter().map(|&p| T::lit(p)).collect())
                .collect(),
        )
    }
}
