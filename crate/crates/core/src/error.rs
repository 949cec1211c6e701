use thiserror::Error;

/// Errors raised while constructing or operating on tabular games.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MfgError {
    #[error("shape mismatch in {what}: expected {expected}, got {got}")]
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what} row {index:?} sums to {sum} (not a probability vector)")]
    NotStochastic {
        what: &'static str,
        index: Vec<usize>,
        sum: f64,
    },
    #[error("{what} entry at {index:?} is {value}, outside [0, 1]")]
    OutOfRange {
        what: &'static str,
        index: Vec<usize>,
        value: f64,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("reward evaluation failed for population {pop}, state {state}, action {action}: {message}")]
    Reward {
        pop: usize,
        state: usize,
        action: usize,
        message: String,
    },
    #[error("population index {pop} out of range (game has {n_populations})")]
    Population { pop: usize, n_populations: usize },
    #[error("empty restricted strategy set for population {0}")]
    EmptyStrategySet(usize),
    #[error("best response value {br} is below the evaluated value {current} for population {pop}")]
    Dominance { pop: usize, br: f64, current: f64 },
}

pub type Result<T, E = MfgError> = std::result::Result<T, E>;
