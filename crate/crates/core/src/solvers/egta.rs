//! Iterative EGTA (double oracle) with restricted FP as the empirical-game solver.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{restricted_fp, EmpiricalGame, FpConfig, RestrictedSolution, SolveTrace, TraceRecord};
use crate::concurrency::Concurrency;
use crate::error::{MfgError, Result};
use crate::model::{Flow, MixedStrategy, Strategy, TabularMfg};
use crate::response::{best_response_from_rewards, evaluate_mixed, reward_table, RegretReport};
use crate::scalar::Scalar;

/// Why the outer loop stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Every population's best-response gain was at most `epsilon`.
    pub terminated_by_no_deviation: bool,
    pub epsilon: f64,
    /// Outer iteration at which the check passed.
    pub iteration: Option<usize>,
    /// Best-response gain per population at the last analysis.
    pub deviation_gains: Vec<f64>,
    /// Exploitability is measured at the empirical equilibrium before the
    /// new best responses are added.
    pub evaluated_at: String,
}

#[derive(Debug, Clone)]
pub struct EgtaOutcome<T> {
    pub trace: SolveTrace<T>,
    pub mixtures: Vec<MixedStrategy<T>>,
    pub flows: Vec<Flow<T>>,
    pub empirical: EmpiricalGame<T>,
    pub certificate: Certificate,
}

/// Runs at most `outer_iters` rounds of strategy-set expansion.
///
/// Each round solves the empirical game with [`restricted_fp`], computes an
/// exact best response per population against the induced flows, stops if
/// no population gains more than `epsilon`, and otherwise adds the new best
/// responses (dropping duplicates).
pub fn iterative_egta<T: Scalar>(
    game: &TabularMfg<T>,
    initial: Vec<Strategy<T>>,
    outer_iters: usize,
    fp_cfg: &FpConfig,
    epsilon: f64,
    concurrency: &Concurrency,
) -> Result<EgtaOutcome<T>> {
    if outer_iters == 0 {
        return Err(MfgError::Config("outer_iters must be >= 1".into()));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(MfgError::Config("epsilon must be >= 0".into()));
    }
    fp_cfg.validate()?;
    let start = Instant::now();
    let mut empirical = EmpiricalGame::new(game, initial)?;
    let mut trace = SolveTrace::new();
    let eps = T::lit(epsilon);
    let mut cached: Option<RestrictedSolution<T>> = None;
    let mut certificate = Certificate {
        terminated_by_no_deviation: false,
        epsilon,
        iteration: None,
        deviation_gains: Vec::new(),
        evaluated_at: "empirical equilibrium before expansion".into(),
    };

    for tau in 1..=outer_iters {
        // an unchanged strategy set reproduces the previous analysis exactly
        let sol = match cached.take() {
            Some(sol) => sol,
            None => restricted_fp(&empirical, game, fp_cfg)?,
        };
        for (pop, counts) in sol.counts.iter().enumerate() {
            empirical.set_counts(pop, counts.clone())?;
        }
        let responses = concurrency
            .map(game.n_populations(), |pop| -> Result<(Strategy<T>, T, T)> {
                let rewards = reward_table(game, pop, &sol.flows)?;
                let br = best_response_from_rewards(game, pop, &rewards);
                let cur = evaluate_mixed(
                    &sol.mixtures[pop],
                    empirical.strategies(pop),
                    &sol.flows,
                    pop,
                    game,
                )?;
                Ok((br.strategy, br.value, cur))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let values: Vec<(T, T)> = responses.iter().map(|(_, v, c)| (*v, *c)).collect();
        let report = RegretReport::from_values(&values)?;
        trace.push(TraceRecord {
            iteration: tau,
            regrets: report.regrets(),
            total: report.total,
            br_count: tau,
            elapsed: start.elapsed(),
            inner_iterations: sol.iterations,
        });
        certificate.deviation_gains = values.iter().map(|&(v, c)| (v - c).as_f64()).collect();

        if values.iter().all(|&(v, c)| v - c <= eps) {
            certificate.terminated_by_no_deviation = true;
            certificate.iteration = Some(tau);
            return Ok(EgtaOutcome {
                trace,
                mixtures: sol.mixtures,
                flows: sol.flows,
                empirical,
                certificate,
            });
        }

        let last = tau == outer_iters;
        let mut grew = false;
        if !last {
            for (pop, (s, _, _)) in responses.into_iter().enumerate() {
                grew |= empirical.push(game, pop, s)?;
            }
        }
        if last || !grew {
            cached = Some(sol);
        }
    }
    let sol = cached.expect("final analysis retained");
    Ok(EgtaOutcome {
        trace,
        mixtures: sol.mixtures,
        flows: sol.flows,
        empirical,
        certificate,
    })
}
