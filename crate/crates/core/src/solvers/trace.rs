use std::time::Duration;

use serde::{Deserialize, Serialize};

/// One recorded point of a solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord<T> {
    /// 1-based iteration index of the solver.
    pub iteration: usize,
    pub regrets: Vec<T>,
    pub total: T,
    /// Best responses computed per population so far.
    pub br_count: usize,
    pub elapsed: Duration,
    /// Restricted-FP iterations used at this point (0 for full FP).
    pub inner_iterations: usize,
}

/// Exploitability curve of a solver run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SolveTrace<T> {
    pub records: Vec<TraceRecord<T>>,
}

impl<T> SolveTrace<T> {
    pub fn new() -> Self {
        Self {
            records: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, record: TraceRecord<T>) {
        debug_assert!(self
            .records
            .last()
            .is_none_or(|r| r.iteration < record.iteration));
        self.records.push(record);
    }

    pub fn last(&self) -> Option<&TraceRecord<T>> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn totals(&self) -> Vec<T>
    where
        T: Copy,
    {
        self.records.iter().map(|r| r.total).collect()
    }
}
