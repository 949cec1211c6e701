//! `profile.json`: final strategy sets, mixtures, certificate and exploitability of a run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use super::HarnessError;
use crate::model::{MixedStrategy, Strategy, TabularMfg};
use crate::response::{exploitability_with, PopulationRegret, RegretReport};
use crate::solvers::{Certificate, EmpiricalGame};
use crate::Concurrency;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationProfile {
    pub strategies: Vec<Strategy<f64>>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodProfile {
    pub method: Method,
    pub iterations: usize,
    pub populations: Vec<PopulationProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub exploitability: RegretReport<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub format_version: u32,
    pub crate_version: String,
    pub config: ExperimentConfig,
    pub methods: Vec<MethodProfile>,
}

impl MethodProfile {
    pub fn new(
        method: Method,
        iterations: usize,
        empirical: &EmpiricalGame<f64>,
        mixtures: &[MixedStrategy<f64>],
        certificate: Option<Certificate>,
        exploitability: RegretReport<f64>,
    ) -> Self {
        let populations = mixtures
            .iter()
            .enumerate()
            .map(|(pop, m)| PopulationProfile {
                strategies: empirical.strategies(pop).to_vec(),
                weights: m.weights().to_vec(),
            })
            .collect();
        Self {
            method,
            iterations,
            populations,
            certificate,
            exploitability,
        }
    }

    /// Rebuilds the empirical game and mixtures against `game`, checking dimensions.
    pub fn restore(
        &self,
        game: &TabularMfg<f64>,
    ) -> Result<(EmpiricalGame<f64>, Vec<MixedStrategy<f64>>), HarnessError> {
        let dim = |m: String| HarnessError::Input(format!("{} profile: {m}", self.method));
        if self.populations.len() != game.n_populations() {
            return Err(dim(format!(
                "{} populations, environment has {}",
                self.populations.len(),
                game.n_populations()
            )));
        }
        let mut sets = Vec::with_capacity(self.populations.len());
        let mut mixtures = Vec::with_capacity(self.populations.len());
        for (pop, p) in self.populations.iter().enumerate() {
            for s in &p.strategies {
                s.validate().map_err(|e| dim(format!("population {pop}: {e}")))?;
                game.check_strategy(s)
                    .map_err(|e| dim(format!("population {pop}: {e}")))?;
            }
            if p.weights.len() != p.strategies.len() {
                return Err(dim(format!(
                    "population {pop}: {} weights for {} strategies",
                    p.weights.len(),
                    p.strategies.len()
                )));
            }
            mixtures.push(
                MixedStrategy::new(p.weights.clone())
                    .map_err(|e| dim(format!("population {pop}: {e}")))?,
            );
            sets.push(p.strategies.clone());
        }
        let empirical = EmpiricalGame::from_sets(game, sets).map_err(|e| dim(e.to_string()))?;
        Ok((empirical, mixtures))
    }

    /// Exploitability of the stored profile, recomputed from scratch.
    pub fn recompute(
        &self,
        game: &TabularMfg<f64>,
        concurrency: &Concurrency,
    ) -> Result<RegretReport<f64>, HarnessError> {
        let (empirical, mixtures) = self.restore(game)?;
        exploitability_with(&mixtures, &empirical, game, concurrency)
            .map_err(|e| HarnessError::Runtime(e.to_string()))
    }
}

impl Profile {
    pub fn new(config: ExperimentConfig) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            methods: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let p: Self =
            serde_json::from_str(text).map_err(|e| HarnessError::Input(format!("profile: {e}")))?;
        if p.format_version != FORMAT_VERSION {
            return Err(HarnessError::Input(format!(
                "profile format_version {} is not supported (expected {FORMAT_VERSION})",
                p.format_version
            )));
        }
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Input(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// `pop <i>: regret=... br_value=... current=...` lines followed by `total: ...`.
pub fn format_report(report: &RegretReport<f64>) -> String {
    let mut out = String::new();
    for (pop, PopulationRegret { best_response_value, current_value, regret }) in
        report.per_population.iter().enumerate()
    {
        out.push_str(&format!(
            "pop {pop}: regret={regret:.9} br_value={best_response_value:.9} current={current_value:.9}\n"
        ));
    }
    out.push_str(&format!("total: {:.9}\n", report.total));
    out
}
