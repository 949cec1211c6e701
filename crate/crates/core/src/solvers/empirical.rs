//! Restricted strategy sets with cached induced flows.

use crate::error::{MfgError, Result};
use crate::flow::{aggregate_strategy, occupancy, propagate_flow};
use crate::model::{Flow, MixedStrategy, Strategy, TabularMfg};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
struct RestrictedSet<T> {
    strategies: Vec<Strategy<T>>,
    flows: Vec<Flow<T>>,
    // mu_t(x) s_t(a|x) of each member, for fast utility evaluation
    occupancies: Vec<Vec<T>>,
    counts: Vec<u64>,
}

/// Per-population restricted strategy sets `Lambda_i`, the flows each member
/// induces from the population's initial distribution, and fictitious-play
/// best-response counts.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalGame<T> {
    sets: Vec<RestrictedSet<T>>,
}

impl<T: Scalar> EmpiricalGame<T> {
    /// Starts from one strategy per population.
    pub fn new(game: &TabularMfg<T>, initial: Vec<Strategy<T>>) -> Result<Self> {
        Self::from_sets(game, initial.into_iter().map(|s| vec![s]).collect())
    }

    /// Builds from explicit strategy lists, one per population.
    pub fn from_sets(game: &TabularMfg<T>, sets: Vec<Vec<Strategy<T>>>) -> Result<Self> {
        if sets.len() != game.n_populations() {
            return Err(MfgError::Shape {
                what: "restricted sets",
                expected: game.n_populations(),
                got: sets.len(),
            });
        }
        let mut out = Self { sets: Vec::new() };
        for (pop, strategies) in sets.into_iter().enumerate() {
            if strategies.is_empty() {
                return Err(MfgError::EmptyStrategySet(pop));
            }
            out.sets.push(RestrictedSet {
                strategies: Vec::new(),
                flows: Vec::new(),
                occupancies: Vec::new(),
                counts: Vec::new(),
            });
            for s in strategies {
                out.insert(game, pop, s)?;
            }
        }
        Ok(out)
    }

    fn insert(&mut self, game: &TabularMfg<T>, pop: usize, s: Strategy<T>) -> Result<()> {
        game.check_strategy(&s)?;
        let flow = propagate_flow(&s, game.initial_dist(pop), game.kernel())?;
        let set = &mut self.sets[pop];
        set.occupancies.push(occupancy(&s, &flow));
        set.flows.push(flow);
        set.strategies.push(s);
        set.counts.push(0);
        Ok(())
    }

    pub fn n_populations(&self) -> usize {
        self.sets.len()
    }

    pub fn len(&self, pop: usize) -> usize {
        self.sets[pop].strategies.len()
    }

    pub fn is_empty(&self, pop: usize) -> bool {
        self.sets[pop].strategies.is_empty()
    }

    pub fn strategies(&self, pop: usize) -> &[Strategy<T>] {
        &self.sets[pop].strategies
    }

    pub fn flows(&self, pop: usize) -> &[Flow<T>] {
        &self.sets[pop].flows
    }

    pub fn counts(&self, pop: usize) -> &[u64] {
        &self.sets[pop].counts
    }

    pub(crate) fn occupancies(&self, pop: usize) -> &[Vec<T>] {
        &self.sets[pop].occupancies
    }

    pub fn set_counts(&mut self, pop: usize, counts: Vec<u64>) -> Result<()> {
        if counts.len() != self.len(pop) {
            return Err(MfgError::Shape {
                what: "best-response counts",
                expected: self.len(pop),
                got: counts.len(),
            });
        }
        self.sets[pop].counts = counts;
        Ok(())
    }

    /// Index of a member within sup-norm `T::DEDUP_TOL` of `s`.
    pub fn find(&self, pop: usize, s: &Strategy<T>) -> Option<usize> {
        let tol = T::lit(T::DEDUP_TOL);
        self.sets[pop]
            .strategies
            .iter()
            .position(|m| m.sup_distance(s).is_some_and(|d| d <= tol))
    }

    /// Appends `s` unless an equal member exists; returns whether it was added.
    pub fn push(&mut self, game: &TabularMfg<T>, pop: usize, s: Strategy<T>) -> Result<bool> {
        game.check_population(pop)?;
        if self.find(pop, &s).is_some() {
            return Ok(false);
        }
        self.insert(game, pop, s)?;
        Ok(true)
    }

    /// Checks mixture lengths against the restricted sets.
    pub fn check_mixtures(&self, mixed: &[MixedStrategy<T>]) -> Result<()> {
        if mixed.len() != self.n_populations() {
            return Err(MfgError::Shape {
                what: "mixtures per population",
                expected: self.n_populations(),
                got: mixed.len(),
            });
        }
        for (pop, m) in mixed.iter().enumerate() {
            if m.len() != self.len(pop) {
                return Err(MfgError::Shape {
                    what: "mixture weights",
                    expected: self.len(pop),
                    got: m.len(),
                });
            }
        }
        Ok(())
    }

    /// Aggregated behavioral strategies of a profile and the flows they induce.
    pub fn induced(
        &self,
        game: &TabularMfg<T>,
        mixed: &[MixedStrategy<T>],
    ) -> Result<(Vec<Strategy<T>>, Vec<Flow<T>>)> {
        self.check_mixtures(mixed)?;
        let mut strategies = Vec::with_capacity(mixed.len());
        let mut flows = Vec::with_capacity(mixed.len());
        for (pop, m) in mixed.iter().enumerate() {
            let s = aggregate_strategy(m, self.strategies(pop), self.flows(pop))?;
            flows.push(propagate_flow(&s, game.initial_dist(pop), game.kernel())?);
            strategies.push(s);
        }
        Ok((strategies, flows))
    }

    /// Recomputes every cached flow and compares bit-for-bit.
    pub fn is_coherent(&self, game: &TabularMfg<T>) -> bool {
        self.sets.iter().enumerate().all(|(pop, set)| {
            set.strategies.len() == set.flows.len()
                && set.strategies.len() == set.counts.len()
                && set.strategies.iter().zip(&set.flows).all(|(s, f)| {
                    propagate_flow(s, game.initial_dist(pop), game.kernel()).as_ref() == Ok(f)
                })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{build_beach_bar_1d, BeachBar1dConfig};

    #[test]
    fn push_deduplicates_and_keeps_cache_coherent() {
        let g = build_beach_bar_1d::<f64>(&BeachBar1dConfig::new(5, 3)).unwrap();
        let u = Strategy::uniform(3, 5, 3);
        let mut e = EmpiricalGame::new(&g, vec![u.clone()]).unwrap();
        assert!(!e.push(&g, 0, u).unwrap());
        let stay = Strategy::deterministic(3, 5, 3, &[1; 20]).unwrap();
        assert!(e.push(&g, 0, stay.clone()).unwrap());
        assert_eq!(e.len(0), 2);
        assert_eq!(e.counts(0), &[0, 0]);
        assert_eq!(e.find(0, &stay), Some(1));
        assert!(e.is_coherent(&g));
    }

    #[test]
    fn rejects_empty_sets_and_bad_shapes() {
        let g = build_beach_bar_1d::<f64>(&BeachBar1dConfig::new(5, 3)).unwrap();
        assert!(matches!(
            EmpiricalGame::from_sets(&g, vec![vec![]]),
            Err(MfgError::EmptyStrategySet(0))
        ));
        assert!(EmpiricalGame::new(&g, vec![Strategy::uniform(2, 5, 3)]).is_err());
        let mut e = EmpiricalGame::new(&g, vec![Strategy::uniform(3, 5, 3)]).unwrap();
        assert!(e.set_counts(0, vec![1, 2]).is_err());
        assert!(e.check_mixtures(&[MixedStrategy::uniform(2)]).is_err());
    }
}
