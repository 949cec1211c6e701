//! Builders for the benchmark games and for hand-specified tabular games.

mod beach_bar;
mod chasing;
mod custom;

pub use beach_bar::{
    build_beach_bar_1d, build_beach_bar_2d, BeachBar1dConfig, BeachBar2dConfig, BeachBarReward,
    BEACH_1D_MOVES,
};
pub use chasing::{build_chasing, quadrant_starts, ChasingConfig, ChasingReward, DEFAULT_PAYOFF, POPULATIONS};
pub use custom::{build_custom, CustomConfig, FnReward, TableReward};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::TabularMfg;
use crate::scalar::Scalar;

/// Floor applied to densities inside every `log` term.
pub const MU_FLOOR: f64 = 1e-10;

pub(crate) fn default_noise() -> f64 {
    0.1
}

pub(crate) fn log_floor<T: Scalar>(mu: T) -> T {
    mu.max(T::lit(MU_FLOOR)).ln()
}

pub(crate) fn torus_distance_1d(x: usize, y: usize, n: usize) -> usize {
    let d = x.abs_diff(y);
    d.min(n - d)
}

pub(crate) fn torus_distance_2d(grid: Grid2D, x: usize, y: usize) -> usize {
    let (rx, cx) = grid.coords(x);
    let (ry, cy) = grid.coords(y);
    torus_distance_1d(rx, ry, grid.height) + torus_distance_1d(cx, cy, grid.width)
}

/// Row-major `height x width` torus; state index is `row * width + col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid2D {
    pub width: usize,
    pub height: usize,
}

impl Grid2D {
    pub const LABELS: [&'static str; 5] = ["stay", "up", "down", "left", "right"];
    /// `(d_row, d_col)` per action, in `LABELS` order.
    pub const MOVES: [(isize, isize); 5] = [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)];

    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }

    pub fn size(&self) -> usize {
        self.width * self.height
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    pub fn coords(&self, x: usize) -> (usize, usize) {
        (x / self.width, x % self.width)
    }

    pub fn shift(&self, x: usize, (dr, dc): (isize, isize)) -> usize {
        let (r, c) = self.coords(x);
        let r = (r as isize + dr).rem_euclid(self.height as isize) as usize;
        let c = (c as isize + dc).rem_euclid(self.width as isize) as usize;
        self.index(r, c)
    }
}

/// Environment block of an experiment config, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnvConfig {
    Beach1d(BeachBar1dConfig),
    Beach2d(BeachBar2dConfig),
    Chasing(ChasingConfig),
    Custom(CustomConfig),
}

impl EnvConfig {
    pub fn build<T: Scalar>(&self) -> Result<TabularMfg<T>> {
        match self {
            EnvConfig::Beach1d(c) => build_beach_bar_1d(c),
            EnvConfig::Beach2d(c) => build_beach_bar_2d(c),
            EnvConfig::Chasing(c) => build_chasing(c),
            EnvConfig::Custom(c) => c.build(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            EnvConfig::Beach1d(_) => "beach1d",
            EnvConfig::Beach2d(_) => "beach2d",
            EnvConfig::Chasing(_) => "chasing",
            EnvConfig::Custom(_) => "custom",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_distances() {
        assert_eq!(torus_distance_1d(0, 9, 10), 1);
        assert_eq!(torus_distance_1d(0, 5, 10), 5);
        let g = Grid2D::new(10, 10);
        assert_eq!(torus_distance_2d(g, 0, g.index(5, 5)), 10);
        assert_eq!(torus_distance_2d(g, 0, g.index(9, 9)), 2);
    }

    #[test]
    fn every_built_kernel_is_stochastic() {
        let games: Vec<TabularMfg<f64>> = vec![
            build_beach_bar_1d(&BeachBar1dConfig::new(1, 1)).unwrap(),
            build_beach_bar_1d(&BeachBar1dConfig::new(2, 1)).unwrap(),
            build_beach_bar_1d(&BeachBar1dConfig::new(10, 1)).unwrap(),
            build_beach_bar_2d(&BeachBar2dConfig::new(1, 3, 1)).unwrap(),
            build_beach_bar_2d(&BeachBar2dConfig::new(10, 10, 1)).unwrap(),
            build_chasing(&ChasingConfig::default()).unwrap(),
        ];
        for g in &games {
            for x in 0..g.n_states() {
                for a in 0..g.n_actions() {
                    let s: f64 = g.kernel().row(x, a).iter().sum();
                    assert!((s - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
