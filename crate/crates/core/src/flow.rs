//! Forward equation and mixture-to-behavioral aggregation.

use crate::error::{MfgError, Result};
use crate::model::{check_distribution, Flow, MixedStrategy, Strategy, TransitionKernel};
use crate::scalar::Scalar;

/// Pushes `initial` forward under `strategy` and `kernel`:
/// `mu[t+1](y) = sum_{x,a} mu[t](x) s_t(a|x) p(y|x,a)`.
pub fn propagate_flow<T: Scalar>(
    strategy: &Strategy<T>,
    initial: &[T],
    kernel: &TransitionKernel<T>,
) -> Result<Flow<T>> {
    let n = kernel.n_states();
    let na = kernel.n_actions();
    if strategy.n_states() != n {
        return Err(MfgError::Shape {
            what: "strategy states vs kernel",
            expected: n,
            got: strategy.n_states(),
        });
    }
    if strategy.n_actions() != na {
        return Err(MfgError::Shape {
            what: "strategy actions vs kernel",
            expected: na,
            got: strategy.n_actions(),
        });
    }
    if initial.len() != n {
        return Err(MfgError::Shape {
            what: "initial distribution",
            expected: n,
            got: initial.len(),
        });
    }
    check_distribution("initial distribution", &[], initial)?;

    let horizon = strategy.horizon();
    let mut dists = Vec::with_capacity((horizon + 1) * n);
    dists.extend_from_slice(initial);
    for t in 0..horizon {
        let mut next = vec![T::zero(); n];
        let cur = &dists[t * n..(t + 1) * n];
        for x in 0..n {
            let mass = cur[x];
            if mass == T::zero() {
                continue;
            }
            let row = strategy.row(t, x);
            for (a, &pa) in row.iter().enumerate() {
                if pa == T::zero() {
                    continue;
                }
                let w = mass * pa;
                for &(y, p) in kernel.successors(x, a) {
                    next[y] = next[y] + w * p;
                }
            }
        }
        dists.extend(next);
    }
    Ok(Flow::from_raw(horizon, n, dists))
}

fn check_members<T: Scalar>(
    mixed: &MixedStrategy<T>,
    strategies: &[Strategy<T>],
    flows: &[Flow<T>],
) -> Result<()> {
    if strategies.is_empty() {
        return Err(MfgError::EmptyStrategySet(0));
    }
    for (what, got) in [("mixture weights", mixed.len()), ("member flows", flows.len())] {
        if got != strategies.len() {
            return Err(MfgError::Shape {
                what,
                expected: strategies.len(),
                got,
            });
        }
    }
    let first = &strategies[0];
    for (s, f) in strategies.iter().zip(flows) {
        if s.horizon() != first.horizon()
            || s.n_states() != first.n_states()
            || s.n_actions() != first.n_actions()
        {
            return Err(MfgError::Shape {
                what: "member strategy size",
                expected: first.tables().len(),
                got: s.tables().len(),
            });
        }
        if f.horizon() != first.horizon() || f.n_states() != first.n_states() {
            return Err(MfgError::Shape {
                what: "member flow size",
                expected: (first.horizon() + 1) * first.n_states(),
                got: f.dists().len(),
            });
        }
    }
    Ok(())
}

/// Behavioral strategy whose induced flow equals the mixture's weighted flow.
///
/// `s(a|x) = sum_k w_k mu_k(x) s_k(a|x) / sum_k w_k mu_k(x)`, and uniform over
/// actions wherever no member carries mass.
pub fn aggregate_strategy<T: Scalar>(
    mixed: &MixedStrategy<T>,
    strategies: &[Strategy<T>],
    flows: &[Flow<T>],
) -> Result<Strategy<T>> {
    check_members(mixed, strategies, flows)?;
    let first = &strategies[0];
    let (horizon, n, na) = (first.horizon(), first.n_states(), first.n_actions());
    let uniform = T::one() / T::from_usize(na).unwrap();
    let mut tables = vec![T::zero(); (horizon + 1) * n * na];
    let mut numer = vec![T::zero(); na];
    for t in 0..=horizon {
        for x in 0..n {
            numer.iter_mut().for_each(|v| *v = T::zero());
            let mut denom = T::zero();
            for ((s, f), &w) in strategies.iter().zip(flows).zip(mixed.weights()) {
                let mass = w * f.dist(t)[x];
                if mass == T::zero() {
                    continue;
                }
                denom = denom + mass;
                for (acc, &p) in numer.iter_mut().zip(s.row(t, x)) {
                    *acc = *acc + mass * p;
                }
            }
            let out = &mut tables[(t * n + x) * na..(t * n + x + 1) * na];
            if denom > T::zero() {
                for (o, &v) in out.iter_mut().zip(&numer) {
                    *o = v / denom;
                }
            } else {
                out.iter_mut().for_each(|o| *o = uniform);
            }
        }
    }
    Ok(Strategy::from_raw(horizon, n, na, tables))
}

/// Weighted average of member flows, `sum_k w_k mu_k`.
pub fn mixture_flow<T: Scalar>(mixed: &MixedStrategy<T>, flows: &[Flow<T>]) -> Result<Flow<T>> {
    let first = flows.first().ok_or(MfgError::EmptyStrategySet(0))?;
    if mixed.len() != flows.len() {
        return Err(MfgError::Shape {
            what: "mixture weights",
            expected: flows.len(),
            got: mixed.len(),
        });
    }
    let mut dists = vec![T::zero(); first.dists().len()];
    for (f, &w) in flows.iter().zip(mixed.weights()) {
        for (d, &v) in dists.iter_mut().zip(f.dists()) {
            *d = *d + w * v;
        }
    }
    Ok(Flow::from_raw(first.horizon(), first.n_states(), dists))
}

/// State-action occupancy `mu_t(x) s_t(a|x)`, indexed `[t][x][a]`.
pub fn occupancy<T: Scalar>(strategy: &Strategy<T>, flow: &Flow<T>) -> Vec<T> {
    let (n, na) = (strategy.n_states(), strategy.n_actions());
    let mut occ = Vec::with_capacity(strategy.tables().len());
    for t in 0..=strategy.horizon() {
        let d = flow.dist(t);
        for x in 0..n {
            occ.extend(strategy.row(t, x).iter().map(|&p| d[x] * p));
        }
    }
    debug_assert_eq!(occ.len(), (strategy.horizon() + 1) * n * na);
    occ
}
