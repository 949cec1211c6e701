//! Tabular finite-horizon mean-field games solved by iterative empirical
//! game-theoretic analysis.
//!
//! The crate builds multi-population games with a shared finite state space
//! ([`environments`]), propagates population flows and aggregates mixtures
//! into behavioral strategies ([`flow`]), computes exact values, best
//! responses and exploitability by backward induction ([`response`]), and
//! runs full-game fictitious play, restricted fictitious play and the
//! iterative EGTA outer loop ([`solvers`]). The [`harness`] module drives
//! experiments from a config file and persists traces, profiles and charts.
//!
//! Numeric code is generic over [`Scalar`]; the aliases below fix it to `f64`.

pub mod concurrency;
pub mod environments;
pub mod error;
pub mod flow;
pub mod harness;
pub mod model;
pub mod response;
pub mod scalar;
pub mod solvers;

pub use concurrency::Concurrency;
pub use error::{MfgError, Result};
pub use flow::{aggregate_strategy, mixture_flow, propagate_flow};
pub use model::{ActionSet, Reward, StateSpace, Topology};
pub use response::{
    best_response, evaluate, evaluate_mixed, exploitability, payoff_matrix, BestResponse,
    PopulationRegret,
};
pub use scalar::Scalar;
pub use solvers::{full_fp, iterative_egta, matrix_fp, restricted_fp, Certificate, FpConfig, InitialPolicy};

pub type Game = model::TabularMfg<f64>;
pub type Strategy = model::Strategy<f64>;
pub type Flow = model::Flow<f64>;
pub type MixedStrategy = model::MixedStrategy<f64>;
pub type TransitionKernel = model::TransitionKernel<f64>;
pub type EmpiricalGame = solvers::EmpiricalGame<f64>;
pub type RegretReport = response::RegretReport<f64>;
pub type ValueTable = response::ValueTable<f64>;
pub type SolveTrace = solvers::SolveTrace<f64>;

pub type GameF32 = model::TabularMfg<f32>;
pub type StrategyF32 = model::Strategy<f32>;
pub type FlowF32 = model::Flow<f32>;
