//! Fictitious play on the full game, the baseline for the EGTA curves.

use std::time::Instant;

use super::{EmpiricalGame, SolveTrace, TraceRecord};
use crate::concurrency::Concurrency;
use crate::error::{MfgError, Result};
use crate::flow::{mixture_flow, propagate_flow};
use crate::model::{Flow, MixedStrategy, Strategy, TabularMfg};
use crate::response::{best_response, exploitability_with};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct FullFpOutcome<T> {
    pub trace: SolveTrace<T>,
    /// Distinct best responses generated so far, with how often each was generated.
    pub history: EmpiricalGame<T>,
    /// Uniform average over the generated best responses.
    pub mixtures: Vec<MixedStrategy<T>>,
}

/// Runs `iters` rounds of full-game FP from `initial`, one strategy per population.
///
/// Round `j` best responds to the current average flows, appends the result
/// and averages uniformly over the `j` generated strategies. Exploitability
/// is recorded every `record_every` rounds and at the last round.
pub fn full_fp<T: Scalar>(
    game: &TabularMfg<T>,
    initial: Vec<Strategy<T>>,
    iters: usize,
    record_every: usize,
    concurrency: &Concurrency,
) -> Result<FullFpOutcome<T>> {
    if iters == 0 || record_every == 0 {
        return Err(MfgError::Config("full_fp needs iters >= 1 and record_every >= 1".into()));
    }
    if initial.len() != game.n_populations() {
        return Err(MfgError::Shape {
            what: "initial strategies",
            expected: game.n_populations(),
            got: initial.len(),
        });
    }
    let start = Instant::now();
    let mut target: Vec<Flow<T>> = initial
        .iter()
        .enumerate()
        .map(|(pop, s)| {
            game.check_strategy(s)?;
            propagate_flow(s, game.initial_dist(pop), game.kernel())
        })
        .collect::<Result<_>>()?;
    let mut history: Option<EmpiricalGame<T>> = None;
    let mut trace = SolveTrace::new();
    let mut mixtures = Vec::new();

    for j in 1..=iters {
        let brs = concurrency
            .map(game.n_populations(), |pop| best_response(&target, pop, game))
            .into_iter()
            .map(|r| r.map(|br| br.strategy))
            .collect::<Result<Vec<_>>>()?;
        let hist = match history.as_mut() {
            None => {
                let mut h = EmpiricalGame::new(game, brs)?;
                for pop in 0..game.n_populations() {
                    h.set_counts(pop, vec![1])?;
                }
                history.insert(h)
            }
            Some(h) => {
                for (pop, s) in brs.into_iter().enumerate() {
                    let k = match h.find(pop, &s) {
                        Some(k) => k,
                        None => {
                            h.push(game, pop, s)?;
                            h.len(pop) - 1
                        }
                    };
                    let mut counts = h.counts(pop).to_vec();
                    counts.resize(h.len(pop), 0);
                    counts[k] += 1;
                    h.set_counts(pop, counts)?;
                }
                h
            }
        };
        let total = T::from_usize(j).unwrap();
        mixtures = (0..game.n_populations())
            .map(|pop| {
                MixedStrategy::from_raw(
                    hist.counts(pop)
                        .iter()
                        .map(|&c| T::from_u64(c).unwrap() / total)
                        .collect(),
                )
            })
            .collect();
        target = mixtures
            .iter()
            .enumerate()
            .map(|(pop, m)| mixture_flow(m, hist.flows(pop)))
            .collect::<Result<_>>()?;

        if j % record_every == 0 || j == iters {
            let report = exploitability_with(&mixtures, hist, game, concurrency)?;
            trace.push(TraceRecord {
                iteration: j,
                regrets: report.regrets(),
                total: report.total,
                br_count: j,
                elapsed: start.elapsed(),
                inner_iterations: 0,
            });
        }
    }
    Ok(FullFpOutcome {
        trace,
        history: history.expect("at least one iteration"),
        mixtures,
    })
}
