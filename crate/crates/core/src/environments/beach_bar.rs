//! Beach bar crowd-aversion games on a 1-D ring and a 2-D torus.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{default_noise, log_floor, torus_distance_1d, torus_distance_2d, Grid2D};
use crate::error::{MfgError, Result};
use crate::model::{ActionSet, Reward, StateSpace, TabularMfg, Topology, TransitionKernel};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeachBar1dConfig {
    pub n_states: usize,
    pub horizon: usize,
    #[serde(default)]
    pub bar_position: usize,
    #[serde(default = "default_noise")]
    pub noise_prob: f64,
    #[serde(default = "default_move_cost_scale")]
    pub move_cost_scale: f64,
}

fn default_move_cost_scale() -> f64 {
    1.0
}

impl BeachBar1dConfig {
    pub fn new(n_states: usize, horizon: usize) -> Self {
        Self {
            n_states,
            horizon,
            bar_position: 0,
            noise_prob: default_noise(),
            move_cost_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_states == 0 {
            return Err(MfgError::Config("n_states must be positive".into()));
        }
        if self.bar_position >= self.n_states {
            return Err(MfgError::Config(format!(
                "bar_position {} outside 0..{}",
                self.bar_position, self.n_states
            )));
        }
        check_noise(self.noise_prob)?;
        if !(self.move_cost_scale.is_finite() && self.move_cost_scale >= 0.0) {
            return Err(MfgError::Config("move_cost_scale must be finite and >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeachBar2dConfig {
    pub width: usize,
    pub height: usize,
    pub horizon: usize,
    /// `(row, col)` of the bar.
    #[serde(default)]
    pub bar_position: (usize, usize),
    #[serde(default = "default_noise")]
    pub noise_prob: f64,
}

impl BeachBar2dConfig {
    pub fn new(width: usize, height: usize, horizon: usize) -> Self {
        Self {
            width,
            height,
            horizon,
            bar_position: (0, 0),
            noise_prob: default_noise(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(MfgError::Config("grid dimensions must be positive".into()));
        }
        let (r, c) = self.bar_position;
        if r >= self.height || c >= self.width {
            return Err(MfgError::Config(format!(
                "bar_position ({r}, {c}) outside {}x{} grid",
                self.height, self.width
            )));
        }
        check_noise(self.noise_prob)
    }
}

pub(super) fn check_noise(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MfgError::Config(format!("noise_prob {p} outside [0, 1]")));
    }
    Ok(())
}

/// `r(x, a, mu) = closeness(x) - cost(a) - log(max(mu(x), floor))`.
#[derive(Debug, Clone)]
pub struct BeachBarReward<T> {
    closeness: Vec<T>,
    move_cost: Vec<T>,
}

impl<T: Scalar> BeachBarReward<T> {
    pub fn closeness(&self) -> &[T] {
        &self.closeness
    }

    pub fn move_cost(&self) -> &[T] {
        &self.move_cost
    }
}

impl<T: Scalar> Reward<T> for BeachBarReward<T> {
    fn reward(
        &self,
        pop: usize,
        state: usize,
        action: usize,
        mean_field: &[&[T]],
    ) -> std::result::Result<T, String> {
        if pop != 0 {
            return Err(format!("beach bar has a single population, got {pop}"));
        }
        let mu = mean_field
            .first()
            .ok_or_else(|| "missing mean field".to_string())?;
        let crowd = log_floor(mu[state]);
        Ok(self.closeness[state] - crowd - self.move_cost[action])
    }
}

/// Closeness to the bar, `1 - d(x, bar) / d_max`.
fn closeness<T: Scalar>(dist: impl Fn(usize) -> usize, n: usize, d_max: usize) -> Vec<T> {
    (0..n)
        .map(|x| {
            if d_max == 0 {
                T::one()
            } else {
                T::one() - T::from_usize(dist(x)).unwrap() / T::from_usize(d_max).unwrap()
            }
        })
        .collect()
}

pub const BEACH_1D_MOVES: [isize; 3] = [-1, 0, 1];

/// Single-population beach bar on a ring of `n_states` cells.
///
/// Actions are `left, stay, right`; the realized move adds noise in
/// `{-1, 0, +1}` with probabilities `(p/2, 1-p, p/2)`.
pub fn build_beach_bar_1d<T: Scalar>(cfg: &BeachBar1dConfig) -> Result<TabularMfg<T>> {
    cfg.validate()?;
    let n = cfg.n_states;
    let p = cfg.noise_prob;
    let noise = [(-1isize, p / 2.0), (0, 1.0 - p), (1, p / 2.0)];
    let kernel = TransitionKernel::from_fn(n, 3, |x, a| {
        let mut row = vec![T::zero(); n];
        for &(eps, q) in &noise {
            if q == 0.0 {
                continue;
            }
            let y = (x as isize + BEACH_1D_MOVES[a] + eps).rem_euclid(n as isize) as usize;
            row[y] = row[y] + T::lit(q);
        }
        row
    })?;
    let reward = BeachBarReward {
        closeness: closeness(|x| torus_distance_1d(x, cfg.bar_position, n), n, n / 2),
        move_cost: BEACH_1D_MOVES
            .iter()
            .map(|m| T::lit(cfg.move_cost_scale * m.unsigned_abs() as f64 / n as f64))
            .collect(),
    };
    TabularMfg::new(
        1,
        StateSpace::new(n, Topology::Torus1D)?,
        ActionSet::new(["left", "stay", "right"])?,
        kernel,
        Arc::new(reward),
        cfg.horizon,
        vec![vec![T::one() / T::from_usize(n).unwrap(); n]],
    )
}

/// Kernel shared by the 2-D games: intended move with probability `1 - p`,
/// otherwise a uniformly random one of the five displacements.
pub(super) fn torus_kernel_2d<T: Scalar>(grid: Grid2D, noise_prob: f64) -> Result<TransitionKernel<T>> {
    let n = grid.size();
    let moves = Grid2D::MOVES;
    let spread = noise_prob / moves.len() as f64;
    TransitionKernel::from_fn(n, moves.len(), |x, a| {
        let mut row = vec![T::zero(); n];
        let intended = grid.shift(x, moves[a]);
        row[intended] = row[intended] + T::lit(1.0 - noise_prob);
        if spread > 0.0 {
            for &m in &moves {
                let y = grid.shift(x, m);
                row[y] = row[y] + T::lit(spread);
            }
        }
        row
    })
}

/// Single-population beach bar on a `height x width` torus with actions
/// `stay, up, down, left, right`.
pub fn build_beach_bar_2d<T: Scalar>(cfg: &BeachBar2dConfig) -> Result<TabularMfg<T>> {
    cfg.validate()?;
    let grid = Grid2D::new(cfg.width, cfg.height);
    let n = grid.size();
    let bar = grid.index(cfg.bar_position.0, cfg.bar_position.1);
    let d_max = cfg.height / 2 + cfg.width / 2;
    let reward = BeachBarReward {
        closeness: closeness(|x| torus_distance_2d(grid, x, bar), n, d_max),
        move_cost: Grid2D::MOVES
            .iter()
            .map(|&(dr, dc)| T::lit((dr.unsigned_abs() + dc.unsigned_abs()) as f64 / n as f64))
            .collect(),
    };
    TabularMfg::new(
        1,
        StateSpace::new(
            n,
            Topology::Torus2D {
                width: cfg.width,
                height: cfg.height,
            },
        )?,
        ActionSet::new(Grid2D::LABELS)?,
        torus_kernel_2d(grid, cfg.noise_prob)?,
        Arc::new(reward),
        cfg.horizon,
        vec![vec![T::one() / T::from_usize(n).unwrap(); n]],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::mean_field_at;

    fn uniform(n: usize) -> Vec<f64> {
        vec![1.0 / n as f64; n]
    }

    #[test]
    fn reward_at_bar_staying_uniform() {
        let g = build_beach_bar_1d::<f64>(&BeachBar1dConfig::new(10, 10)).unwrap();
        let mu = uniform(10);
        let r = g.reward(0, 0, 1, &[&mu]).unwrap();
        assert!((r - (1.0 + 10f64.ln())).abs() < 1e-15);
        assert!((r - 3.302585).abs() < 1e-6);
    }

    #[test]
    fn move_cost_is_one_over_states() {
        let g = build_beach_bar_1d::<f64>(&BeachBar1dConfig::new(10, 10)).unwrap();
        let mu: Vec<f64> = (1..=10).map(|v| v as f64 / 55.0).collect();
        for x in 0..10 {
            let stay = g.reward(0, x, 1, &[&mu]).unwrap();
            for a in [0, 2] {
                let moved = g.reward(0, x, a, &[&mu]).unwrap();
                assert!((moved - stay + 0.1).abs() < 1e-15, "x={x} a={a}");
            }
        }
    }

    #[test]
    fn noise_free_shift_is_point_mass() {
        let mut cfg = BeachBar1dConfig::new(10, 3);
        cfg.noise_prob = 0.0;
        let g = build_beach_bar_1d::<f64>(&cfg).unwrap();
        let row = g.kernel().row(3, 2);
        assert_eq!(row[4], 1.0);
        assert_eq!(row.iter().sum::<f64>(), 1.0);
        assert_eq!(g.kernel().successors(0, 0), &[(9, 1.0)]);
    }

    #[test]
    fn noisy_1d_kernel_rows() {
        let g = build_beach_bar_1d::<f64>(&BeachBar1dConfig::new(10, 3)).unwrap();
        assert_eq!(g.kernel().successors(3, 2), &[(3, 0.05), (4, 0.9), (5, 0.05)]);
    }

    #[test]
    fn reflection_symmetry_1d() {
        let mut cfg = BeachBar1dConfig::new(9, 2);
        cfg.noise_prob = 0.0;
        cfg.bar_position = 2;
        let g = build_beach_bar_1d::<f64>(&cfg).unwrap();
        let n = 9isize;
        let mu = uniform(9);
        let reflect = |x: usize| (2 * 2 - x as isize).rem_euclid(n) as usize;
        for x in 0..9 {
            for a in 0..3 {
                let (rx, ra) = (reflect(x), 2 - a);
                assert!(
                    (g.reward(0, x, a, &[&mu]).unwrap() - g.reward(0, rx, ra, &[&mu]).unwrap()).abs()
                        < 1e-15
                );
                for y in 0..9 {
                    assert_eq!(g.kernel().prob(x, a, y), g.kernel().prob(rx, ra, reflect(y)));
                }
            }
        }
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = BeachBar1dConfig::new(10, 3);
        cfg.bar_position = 10;
        assert!(build_beach_bar_1d::<f64>(&cfg).is_err());
        let mut cfg = BeachBar1dConfig::new(10, 3);
        cfg.noise_prob = 1.5;
        assert!(build_beach_bar_1d::<f64>(&cfg).is_err());
        let mut cfg = BeachBar2dConfig::new(4, 4, 3);
        cfg.bar_position = (4, 0);
        assert!(build_beach_bar_2d::<f64>(&cfg).is_err());
    }

    #[test]
    fn reward_2d_at_bar() {
        let g = build_beach_bar_2d::<f64>(&BeachBar2dConfig::new(10, 10, 10)).unwrap();
        let mu = uniform(100);
        let r = g.reward(0, 0, 0, &[&mu]).unwrap();
        assert!((r - 5.605170).abs() < 1e-6);
    }

    #[test]
    fn up_from_row_two() {
        let mut cfg = BeachBar2dConfig::new(10, 10, 3);
        cfg.noise_prob = 0.0;
        let g = build_beach_bar_2d::<f64>(&cfg).unwrap();
        let x = 2 * 10 + 3;
        assert_eq!(g.kernel().successors(x, 1), &[(10 + 3, 1.0)]);
        // wraps around the top edge
        assert_eq!(g.kernel().successors(3, 1), &[(90 + 3, 1.0)]);
    }

    #[test]
    fn antipode_closeness_is_zero() {
        let g = build_beach_bar_2d::<f64>(&BeachBar2dConfig::new(10, 10, 3)).unwrap();
        let mu = uniform(100);
        let log_term = 100f64.ln();
        let anti = 5 * 10 + 5;
        assert!((g.reward(0, anti, 0, &[&mu]).unwrap() - log_term).abs() < 1e-12);
    }

    #[test]
    fn kernels_are_stochastic_in_f32() {
        let g = build_beach_bar_2d::<f32>(&BeachBar2dConfig::new(3, 4, 2)).unwrap();
        let flows = [crate::model::Flow::new(0, 12, vec![1.0 / 12.0; 12]).unwrap()];
        let mf = mean_field_at(&flows, 0);
        assert!(g.reward(0, 0, 0, &mf).unwrap().is_finite());
    }
}
