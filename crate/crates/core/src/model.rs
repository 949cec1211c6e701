//! Domain types for tabular finite-horizon mean-field games.
//!
//! All tensors are dense and stored row-major in flat vectors. Time is
//! indexed `t in 0..=horizon`, so strategies and flows carry `horizon + 1`
//! slices.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MfgError, Result};
use crate::scalar::{sum, Scalar};

/// Layout of the state space, used by the environment builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    Torus1D,
    Torus2D { width: usize, height: usize },
    Abstract,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    size: usize,
    topology: Topology,
}

impl StateSpace {
    pub fn new(size: usize, topology: Topology) -> Result<Self> {
        if size == 0 {
            return Err(MfgError::Config("state space must have at least one state".into()));
        }
        if let Topology::Torus2D { width, height } = topology {
            if width * height != size {
                return Err(MfgError::Config(format!(
                    "torus {width}x{height} does not cover {size} states"
                )));
            }
        }
        Ok(Self { size, topology })
    }

    pub fn abstract_space(size: usize) -> Result<Self> {
        Self::new(size, Topology::Abstract)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSet {
    labels: Vec<String>,
}

impl ActionSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(MfgError::Config("action set must not be empty".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(MfgError::Config(format!("duplicate action label {l:?}")));
            }
        }
        Ok(Self { labels })
    }

    /// Actions labelled `a0, a1, ...`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("a{i}")))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

fn check_row<T: Scalar>(what: &'static str, index: &[usize], row: &[T]) -> Result<()> {
    for (k, &v) in row.iter().enumerate() {
        if !(v >= T::zero() && v <= T::one()) {
            let mut index = index.to_vec();
            index.push(k);
            return Err(MfgError::OutOfRange {
                what,
                index,
                value: v.as_f64(),
            });
        }
    }
    let s = sum(row);
    if (s - T::one()).abs() > T::simplex_tol() {
        return Err(MfgError::NotStochastic {
            what,
            index: index.to_vec(),
            sum: s.as_f64(),
        });
    }
    Ok(())
}

/// Probability vector check used for initial distributions and mixtures.
pub fn check_distribution<T: Scalar>(what: &'static str, index: &[usize], dist: &[T]) -> Result<()> {
    check_row(what, index, dist)
}

/// Dense transition kernel `p(x' | x, a)` indexed `[x][a][x']`.
#[derive(Clone, PartialEq)]
pub struct TransitionKernel<T> {
    n_states: usize,
    n_actions: usize,
    probs: Vec<T>,
    // nonzero (x', p) pairs per (x, a); every built environment has at most
    // five successors per row
    support: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> TransitionKernel<T> {
    pub fn new(n_states: usize, n_actions: usize, probs: Vec<T>) -> Result<Self> {
        let expected = n_states * n_actions * n_states;
        if probs.len() != expected {
            return Err(MfgError::Shape {
                what: "transition kernel",
                expected,
                got: probs.len(),
            });
        }
        let mut support = Vec::with_capacity(n_states * n_actions);
        for x in 0..n_states {
            for a in 0..n_actions {
                let base = (x * n_actions + a) * n_states;
                let row = &probs[base..base + n_states];
                check_row("transition kernel", &[x, a], row)?;
                support.push(
                    row.iter()
                        .enumerate()
                        .filter(|(_, &p)| p != T::zero())
                        .map(|(y, &p)| (y, p))
                        .collect(),
                );
            }
        }
        Ok(Self {
            n_states,
            n_actions,
            probs,
            support,
        })
    }

    /// Builds a kernel from a closure returning the successor distribution of `(x, a)`.
    pub fn from_fn(
        n_states: usize,
        n_actions: usize,
        mut row: impl FnMut(usize, usize) -> Vec<T>,
    ) -> Result<Self> {
        let mut probs = Vec::with_capacity(n_states * n_actions * n_states);
        for x in 0..n_states {
            for a in 0..n_actions {
                let r = row(x, a);
                if r.len() != n_states {
                    return Err(MfgError::Shape {
                        what: "transition kernel row",
                        expected: n_states,
                        got: r.len(),
                    });
                }
                probs.extend(r);
            }
        }
        Self::new(n_states, n_actions, probs)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn prob(&self, x: usize, a: usize, next: usize) -> T {
        self.probs[(x * self.n_actions + a) * self.n_states + next]
    }

    pub fn row(&self, x: usize, a: usize) -> &[T] {
        let base = (x * self.n_actions + a) * self.n_states;
        &self.probs[base..base + self.n_states]
    }

    /// Nonzero successors of `(x, a)` in increasing state order.
    pub fn successors(&self, x: usize, a: usize) -> &[(usize, T)] {
        &self.support[x * self.n_actions + a]
    }
}

impl<T: fmt::Debug> fmt::Debug for TransitionKernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransitionKernel")
            .field("n_states", &self.n_states)
            .field("n_actions", &self.n_actions)
            .finish_non_exhaustive()
    }
}

/// Time-indexed stochastic policy, one row-stochastic `|X| x |A|` table per `t in 0..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy<T> {
    horizon: usize,
    n_states: usize,
    n_actions: usize,
    tables: Vec<T>,
}

impl<T: Scalar> Strategy<T> {
    pub fn new(horizon: usize, n_states: usize, n_actions: usize, tables: Vec<T>) -> Result<Self> {
        let s = Self {
            horizon,
            n_states,
            n_actions,
            tables,
        };
        s.validate()?;
        Ok(s)
    }

    /// Re-checks shape and row-stochasticity, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        let expected = (self.horizon + 1) * self.n_states * self.n_actions;
        if self.tables.len() != expected {
            return Err(MfgError::Shape {
                what: "strategy tables",
                expected,
                got: self.tables.len(),
            });
        }
        if self.n_actions == 0 || self.n_states == 0 {
            return Err(MfgError::Config("strategy needs at least one state and action".into()));
        }
        for t in 0..=self.horizon {
            for x in 0..self.n_states {
                check_row("strategy", &[t, x], self.row(t, x))?;
            }
        }
        Ok(())
    }

    pub fn uniform(horizon: usize, n_states: usize, n_actions: usize) -> Self {
        let p = T::one() / T::from_usize(n_actions).unwrap();
        Self {
            horizon,
            n_states,
            n_actions,
            tables: vec![p; (horizon + 1) * n_states * n_actions],
        }
    }

    /// Deterministic strategy from a `[t][x]` table of chosen actions.
    pub fn deterministic(
        horizon: usize,
        n_states: usize,
        n_actions: usize,
        choices: &[usize],
    ) -> Result<Self> {
        let expected = (horizon + 1) * n_states;
        if choices.len() != expected {
            return Err(MfgError::Shape {
                what: "deterministic choices",
                expected,
                got: choices.len(),
            });
        }
        let mut tables = vec![T::zero(); expected * n_actions];
        for (cell, &a) in choices.iter().enumerate() {
            if a >= n_actions {
                return Err(MfgError::Shape {
                    what: "action index",
                    expected: n_actions,
                    got: a,
                });
            }
            tables[cell * n_actions + a] = T::one();
        }
        Ok(Self {
            horizon,
            n_states,
            n_actions,
            tables,
        })
    }

    /// Uniformly random point of the simplex for every `(t, x)` row.
    pub fn random<R: Rng + ?Sized>(
        horizon: usize,
        n_states: usize,
        n_actions: usize,
        rng: &mut R,
    ) -> Self {
        let mut tables = Vec::with_capacity((horizon + 1) * n_states * n_actions);
        let mut row = vec![0.0f64; n_actions];
        for _ in 0..(horizon + 1) * n_states {
            // normalized exponentials are Dirichlet(1, ..., 1)
            for v in row.iter_mut() {
                let u: f64 = rng.gen();
                *v = -(1.0 - u).ln();
            }
            let total: f64 = row.iter().sum();
            let mut acc = T::zero();
            for (k, v) in row.iter().enumerate() {
                let p = if k + 1 == n_actions {
                    T::one() - acc
                } else {
                    T::lit(v / total)
                };
                let p = p.max(T::zero());
                acc = acc + p;
                tables.push(p);
            }
        }
        Self {
            horizon,
            n_states,
            n_actions,
            tables,
        }
    }

    pub(crate) fn from_raw(horizon: usize, n_states: usize, n_actions: usize, tables: Vec<T>) -> Self {
        debug_assert_eq!(tables.len(), (horizon + 1) * n_states * n_actions);
        Self {
            horizon,
            n_states,
            n_actions,
            tables,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn prob(&self, t: usize, x: usize, a: usize) -> T {
        self.tables[(t * self.n_states + x) * self.n_actions + a]
    }

    pub fn row(&self, t: usize, x: usize) -> &[T] {
        let base = (t * self.n_states + x) * self.n_actions;
        &self.tables[base..base + self.n_actions]
    }

    pub fn tables(&self) -> &[T] {
        &self.tables
    }

    /// Largest absolute entry-wise difference; `None` when shapes differ.
    pub fn sup_distance(&self, other: &Self) -> Option<T> {
        if self.horizon != other.horizon
            || self.n_states != other.n_states
            || self.n_actions != other.n_actions
        {
            return None;
        }
        Some(
            self.tables
                .iter()
                .zip(&other.tables)
                .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())),
        )
    }

    pub fn cast<U: Scalar>(&self) -> Strategy<U> {
        Strategy {
            horizon: self.horizon,
            n_states: self.n_states,
            n_actions: self.n_actions,
            tables: self.tables.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}

/// Time-indexed population distribution, one point of the simplex per `t in 0..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow<T> {
    horizon: usize,
    n_states: usize,
    dists: Vec<T>,
}

impl<T: Scalar> Flow<T> {
    pub fn new(horizon: usize, n_states: usize, dists: Vec<T>) -> Result<Self> {
        let expected = (horizon + 1) * n_states;
        if dists.len() != expected {
            return Err(MfgError::Shape {
                what: "flow",
                expected,
                got: dists.len(),
            });
        }
        let f = Self {
            horizon,
            n_states,
            dists,
        };
        for t in 0..=horizon {
            check_row("flow", &[t], f.dist(t))?;
        }
        Ok(f)
    }

    pub(crate) fn from_raw(horizon: usize, n_states: usize, dists: Vec<T>) -> Self {
        debug_assert_eq!(dists.len(), (horizon + 1) * n_states);
        Self {
            horizon,
            n_states,
            dists,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn dist(&self, t: usize) -> &[T] {
        &self.dists[t * self.n_states..(t + 1) * self.n_states]
    }

    pub fn dists(&self) -> &[T] {
        &self.dists
    }
}

/// Probability weights over the members of a restricted strategy set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy<T> {
    weights: Vec<T>,
}

impl<T: Scalar> MixedStrategy<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(MfgError::Config("mixed strategy over an empty set".into()));
        }
        check_row("mixed strategy", &[], &weights)?;
        Ok(Self { weights })
    }

    /// Rescales non-negative raw weights to sum to one.
    pub fn normalized(raw: Vec<T>) -> Result<Self> {
        let total = sum(&raw);
        if raw.is_empty() || total.is_nan() || total <= T::zero() || raw.iter().any(|&w| w < T::zero()) {
            return Err(MfgError::Config("cannot normalize weights".into()));
        }
        Self::new(raw.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform mixture over an empty set");
        let w = T::one() / T::from_usize(n).unwrap();
        Self { weights: vec![w; n] }
    }

    pub fn pure(n: usize, k: usize) -> Self {
        let mut weights = vec![T::zero(); n];
        weights[k] = T::one();
        Self { weights }
    }

    pub(crate) fn from_raw(weights: Vec<T>) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Per-population immediate reward `r_i(x, a, mu_t)`.
///
/// `mean_field[j]` is the time-`t` distribution of population `j`.
pub trait Reward<T>: Send + Sync + fmt::Debug {
    fn reward(
        &self,
        pop: usize,
        state: usize,
        action: usize,
        mean_field: &[&[T]],
    ) -> std::result::Result<T, String>;
}

/// Complete tabular multi-population mean-field game.
#[derive(Clone)]
pub struct TabularMfg<T> {
    n_populations: usize,
    state_space: StateSpace,
    action_set: ActionSet,
    kernel: TransitionKernel<T>,
    reward: Arc<dyn Reward<T>>,
    horizon: usize,
    initial_dists: Vec<Vec<T>>,
}

impl<T: Scalar> TabularMfg<T> {
    /// Validates every component and probes the reward at all `(pop, x, a)`
    /// against the initial distributions.
    pub fn new(
        n_populations: usize,
        state_space: StateSpace,
        action_set: ActionSet,
        kernel: TransitionKernel<T>,
        reward: Arc<dyn Reward<T>>,
        horizon: usize,
        initial_dists: Vec<Vec<T>>,
    ) -> Result<Self> {
        if n_populations == 0 {
            return Err(MfgError::Config("game needs at least one population".into()));
        }
        let n = state_space.size();
        if kernel.n_states() != n {
            return Err(MfgError::Shape {
                what: "kernel states",
                expected: n,
                got: kernel.n_states(),
            });
        }
        if kernel.n_actions() != action_set.size() {
            return Err(MfgError::Shape {
                what: "kernel actions",
                expected: action_set.size(),
                got: kernel.n_actions(),
            });
        }
        if initial_dists.len() != n_populations {
            return Err(MfgError::Shape {
                what: "initial distributions",
                expected: n_populations,
                got: initial_dists.len(),
            });
        }
        for (i, d) in initial_dists.iter().enumerate() {
            if d.len() != n {
                return Err(MfgError::Shape {
                    what: "initial distribution",
                    expected: n,
                    got: d.len(),
                });
            }
            check_row("initial distribution", &[i], d)?;
        }
        let game = Self {
            n_populations,
            state_space,
            action_set,
            kernel,
            reward,
            horizon,
            initial_dists,
        };
        let mf: Vec<&[T]> = game.initial_dists.iter().map(Vec::as_slice).collect();
        for pop in 0..n_populations {
            for x in 0..n {
                for a in 0..game.n_actions() {
                    let r = game.reward(pop, x, a, &mf)?;
                    if !r.is_finite() {
                        return Err(MfgError::Reward {
                            pop,
                            state: x,
                            action: a,
                            message: format!("non-finite reward {r}"),
                        });
                    }
                }
            }
        }
        Ok(game)
    }

    pub fn n_populations(&self) -> usize {
        self.n_populations
    }

    pub fn n_states(&self) -> usize {
        self.state_space.size()
    }

    pub fn n_actions(&self) -> usize {
        self.action_set.size()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn state_space(&self) -> &StateSpace {
        &self.state_space
    }

    pub fn action_set(&self) -> &ActionSet {
        &self.action_set
    }

    pub fn kernel(&self) -> &TransitionKernel<T> {
        &self.kernel
    }

    pub fn initial_dist(&self, pop: usize) -> &[T] {
        &self.initial_dists[pop]
    }

    pub fn reward_model(&self) -> &Arc<dyn Reward<T>> {
        &self.reward
    }

    pub fn reward(&self, pop: usize, x: usize, a: usize, mean_field: &[&[T]]) -> Result<T> {
        self.reward
            .reward(pop, x, a, mean_field)
            .map_err(|message| MfgError::Reward {
                pop,
                state: x,
                action: a,
                message,
            })
    }

    pub fn check_population(&self, pop: usize) -> Result<()> {
        if pop >= self.n_populations {
            return Err(MfgError::Population {
                pop,
                n_populations: self.n_populations,
            });
        }
        Ok(())
    }

    /// Shape check of a strategy against this game.
    pub fn check_strategy(&self, s: &Strategy<T>) -> Result<()> {
        for (what, expected, got) in [
            ("strategy horizon", self.horizon, s.horizon()),
            ("strategy states", self.n_states(), s.n_states()),
            ("strategy actions", self.n_actions(), s.n_actions()),
        ] {
            if expected != got {
                return Err(MfgError::Shape { what, expected, got });
            }
        }
        Ok(())
    }

    /// Shape check of one flow per population.
    pub fn check_flows(&self, flows: &[Flow<T>]) -> Result<()> {
        if flows.len() != self.n_populations {
            return Err(MfgError::Shape {
                what: "flows per population",
                expected: self.n_populations,
                got: flows.len(),
            });
        }
        for f in flows {
            if f.horizon() != self.horizon {
                return Err(MfgError::Shape {
                    what: "flow horizon",
                    expected: self.horizon,
                    got: f.horizon(),
                });
            }
            if f.n_states() != self.n_states() {
                return Err(MfgError::Shape {
                    what: "flow states",
                    expected: self.n_states(),
                    got: f.n_states(),
                });
            }
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for TabularMfg<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TabularMfg")
            .field("n_populations", &self.n_populations)
            .field("state_space", &self.state_space)
            .field("action_set", &self.action_set)
            .field("horizon", &self.horizon)
            .field("reward", &self.reward)
            .finish_non_exhaustive()
    }
}

/// Time-`t` slices of every population's flow.
pub fn mean_field_at<T: Scalar>(flows: &[Flow<T>], t: usize) -> Vec<&[T]> {
    flows.iter().map(|f| f.dist(t)).collect()
}
