use crate::error::{MfgError, Result};
use crate::model::MixedStrategy;
use crate::scalar::Scalar;

/// Symmetric fictitious play on a square payoff matrix.
///
/// `m[j][k]` is the row player's payoff for playing `j` against a population
/// playing `k`. Each step the row player best responds to the population's
/// current empirical mixture; tied maximizers share the step equally. The
/// uniform start counts as one observation.
pub fn matrix_fp<T: Scalar>(m: &[Vec<T>], iters: usize) -> Result<MixedStrategy<T>> {
    let n = m.len();
    if n == 0 {
        return Err(MfgError::Config("empty payoff matrix".into()));
    }
    if let Some(row) = m.iter().find(|r| r.len() != n) {
        return Err(MfgError::Shape {
            what: "payoff matrix row (must be square)",
            expected: n,
            got: row.len(),
        });
    }
    if iters == 0 {
        return Err(MfgError::Config("matrix_fp needs iters >= 1".into()));
    }
    let mut counts = vec![T::one() / T::from_usize(n).unwrap(); n];
    let mut total = T::one();
    for _ in 0..iters {
        let payoffs: Vec<T> = m
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&counts)
                    .fold(T::zero(), |acc, (&u, &c)| acc + u * c)
                    / total
            })
            .collect();
        let best = payoffs.iter().fold(T::neg_infinity(), |b, &v| b.max(v));
        let winners: Vec<usize> = (0..n).filter(|&j| payoffs[j] == best).collect();
        let share = T::one() / T::from_usize(winners.len()).unwrap();
        for j in winners {
            counts[j] = counts[j] + share;
        }
        total = total + T::one();
    }
    MixedStrategy::normalized(counts)
}
