//! Full-game FP, restricted FP, the iterative EGTA loop and a matrix-game FP helper.

mod egta;
mod empirical;
mod full_fp;
mod matrix_fp;
mod restricted_fp;
mod trace;

pub use egta::{iterative_egta, Certificate, EgtaOutcome};
pub use empirical::EmpiricalGame;
pub use full_fp::{full_fp, FullFpOutcome};
pub use matrix_fp::matrix_fp;
pub use restricted_fp::{restricted_fp, restricted_fp_traced, FpConfig, RestrictedSolution};
pub use trace::{SolveTrace, TraceRecord};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Strategy, TabularMfg};
use crate::scalar::Scalar;

/// How the first strategy of every population is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialPolicy {
    /// Independent uniformly random rows from a generator seeded with the run seed.
    #[default]
    Random,
    /// Uniform over actions everywhere.
    Uniform,
}

/// One initial strategy per population, drawn in population order.
pub fn initial_strategies<T: Scalar>(
    game: &TabularMfg<T>,
    policy: InitialPolicy,
    seed: u64,
) -> Vec<Strategy<T>> {
    let (h, n, na) = (game.horizon(), game.n_states(), game.n_actions());
    match policy {
        InitialPolicy::Uniform => (0..game.n_populations())
            .map(|_| Strategy::uniform(h, n, na))
            .collect(),
        InitialPolicy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..game.n_populations())
                .map(|_| Strategy::random(h, n, na, &mut rng))
                .collect()
        }
    }
}
