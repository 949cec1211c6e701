//! Three-population cyclic chasing (hens, snakes, foxes) on a 2-D torus.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::beach_bar::{check_noise, torus_kernel_2d};
use super::{default_noise, log_floor, Grid2D};
use crate::error::{MfgError, Result};
use crate::model::{check_distribution, ActionSet, Reward, StateSpace, TabularMfg, Topology};
use crate::scalar::Scalar;

pub const POPULATIONS: [&str; 3] = ["hens", "snakes", "foxes"];

/// Row player's payoff: hens lose to snakes and beat foxes, cyclically.
pub const DEFAULT_PAYOFF: [[f64; 3]; 3] = [[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChasingConfig {
    #[serde(default = "default_side")]
    pub width: usize,
    #[serde(default = "default_side")]
    pub height: usize,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_payoff")]
    pub payoff_table: [[f64; 3]; 3],
    /// One distribution per population; quadrant blocks when absent.
    #[serde(default)]
    pub initial_dists: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_noise")]
    pub noise_prob: f64,
}

fn default_side() -> usize {
    5
}

fn default_horizon() -> usize {
    10
}

fn default_payoff() -> [[f64; 3]; 3] {
    DEFAULT_PAYOFF
}

impl Default for ChasingConfig {
    fn default() -> Self {
        Self {
            width: default_side(),
            height: default_side(),
            horizon: default_horizon(),
            payoff_table: DEFAULT_PAYOFF,
            initial_dists: None,
            noise_prob: default_noise(),
        }
    }
}

impl ChasingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(MfgError::Config("grid dimensions must be positive".into()));
        }
        for (i, row) in self.payoff_table.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(MfgError::Config(format!(
                    "payoff_table[{i}][{i}] must be 0, got {}",
                    row[i]
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(MfgError::Config(format!("payoff_table row {i} not finite")));
            }
        }
        if let Some(d) = &self.initial_dists {
            if d.len() != 3 {
                return Err(MfgError::Config(format!(
                    "chasing needs 3 initial distributions, got {}",
                    d.len()
                )));
            }
            for (i, dist) in d.iter().enumerate() {
                if dist.len() != self.width * self.height {
                    return Err(MfgError::Shape {
                        what: "chasing initial distribution",
                        expected: self.width * self.height,
                        got: dist.len(),
                    });
                }
                check_distribution("chasing initial distribution", &[i], dist)?;
            }
        }
        check_noise(self.noise_prob)
    }
}

/// Uniform over three of the four `ceil(w/2) x ceil(h/2)` corner blocks
/// (top-left, top-right, bottom-left).
pub fn quadrant_starts<T: Scalar>(width: usize, height: usize) -> Vec<Vec<T>> {
    let grid = Grid2D::new(width, height);
    let (bw, bh) = (width.div_ceil(2), height.div_ceil(2));
    let origins = [(0, 0), (0, width - bw), (height - bh, 0)];
    origins
        .iter()
        .map(|&(r0, c0)| {
            let mut d = vec![T::zero(); grid.size()];
            let w = T::one() / T::from_usize(bw * bh).unwrap();
            for r in r0..r0 + bh {
                for c in c0..c0 + bw {
                    d[grid.index(r, c)] = w;
                }
            }
            d
        })
        .collect()
}

/// `r_i(x, a, mu) = -log(max(mu_i(x), floor)) + sum_{j != i} mu_j(x) R(i, j)`.
#[derive(Debug, Clone)]
pub struct ChasingReward<T> {
    payoff: [[T; 3]; 3],
}

impl<T: Scalar> ChasingReward<T> {
    pub fn new(payoff: &[[f64; 3]; 3]) -> Self {
        Self {
            payoff: payoff.map(|row| row.map(T::lit)),
        }
    }

    /// The interaction part `sum_{j != i} mu_j(x) R(i, j)`.
    pub fn interaction(&self, pop: usize, state: usize, mean_field: &[&[T]]) -> T {
        (0..3)
            .filter(|&j| j != pop)
            .fold(T::zero(), |acc, j| acc + mean_field[j][state] * self.payoff[pop][j])
    }
}

impl<T: Scalar> Reward<T> for ChasingReward<T> {
    fn reward(
        &self,
        pop: usize,
        state: usize,
        _action: usize,
        mean_field: &[&[T]],
    ) -> std::result::Result<T, String> {
        if pop >= 3 || mean_field.len() != 3 {
            return Err(format!(
                "chasing has 3 populations (pop {pop}, {} distributions)",
                mean_field.len()
            ));
        }
        Ok(self.interaction(pop, state, mean_field) - log_floor(mean_field[pop][state]))
    }
}

pub fn build_chasing<T: Scalar>(cfg: &ChasingConfig) -> Result<TabularMfg<T>> {
    cfg.validate()?;
    let grid = Grid2D::new(cfg.width, cfg.height);
    let initial = match &cfg.initial_dists {
        Some(d) => d.iter().map(|v| v.iter().map(|&p| T::lit(p)).collect()).collect(),
        None => quadrant_starts(cfg.width, cfg.height),
    };
    TabularMfg::new(
        3,
        StateSpace::new(
            grid.size(),
            Topology::Torus2D {
                width: cfg.width,
                height: cfg.height,
            },
        )?,
        ActionSet::new(Grid2D::LABELS)?,
        torus_kernel_2d(grid, cfg.noise_prob)?,
        Arc::new(ChasingReward::<T>::new(&cfg.payoff_table)),
        cfg.horizon,
        initial,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_first_coordinates() {
        assert_eq!(DEFAULT_PAYOFF[0][1], -1.0);
        assert_eq!(DEFAULT_PAYOFF[0][2], 1.0);
        for (i, row) in DEFAULT_PAYOFF.iter().enumerate() {
            assert_eq!(row[i], 0.0);
            assert_eq!(row.iter().sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn equal_masses_cancel() {
        let r = ChasingReward::<f64>::new(&DEFAULT_PAYOFF);
        let mu = [0.3, 0.1];
        let mf: [&[f64]; 3] = [&mu, &mu, &mu];
        for pop in 0..3 {
            assert_eq!(r.interaction(pop, 0, &mf), 0.0);
        }
    }

    #[test]
    fn hens_reward_example() {
        let r = ChasingReward::<f64>::new(&DEFAULT_PAYOFF);
        let (h, s, f) = ([0.1], [0.2], [0.05]);
        let mf: [&[f64]; 3] = [&h, &s, &f];
        assert!((r.interaction(0, 0, &mf) + 0.15).abs() < 1e-15);
        let full = r.reward(0, 0, 3, &mf).unwrap();
        assert!((full - (-(0.1f64).ln() - 0.15)).abs() < 1e-15);
        assert!((full - 2.152585).abs() < 1e-6);
    }

    #[test]
    fn quadrant_starts_are_distinct_distributions() {
        let d = quadrant_starts::<f64>(5, 5);
        assert_eq!(d.len(), 3);
        for v in &d {
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(v.iter().filter(|&&p| p > 0.0).count(), 9);
        }
        assert_ne!(d[0], d[1]);
        assert_ne!(d[0], d[2]);
        assert_ne!(d[1], d[2]);
    }

    #[test]
    fn nonzero_diagonal_rejected() {
        let mut cfg = ChasingConfig::default();
        cfg.payoff_table[1][1] = 0.5;
        assert!(build_chasing::<f64>(&cfg).is_err());
    }

    #[test]
    fn builds_default_game() {
        let g = build_chasing::<f64>(&ChasingConfig::default()).unwrap();
        assert_eq!(g.n_populations(), 3);
        assert_eq!(g.n_states(), 25);
        assert_eq!(g.n_actions(), 5);
        assert_eq!(g.horizon(), 10);
    }
}
