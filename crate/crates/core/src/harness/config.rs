//! Experiment configuration: a TOML file with flat scalar keys and one `[env]` table.
//!
//! ```toml
//! seed = 7
//! methods = ["egta", "fp"]
//! outer_iters = 30
//! fp_iters = 30
//! output_dir = "runs/beach1d"
//!
//! [env]
//! kind = "beach1d"
//! n_states = 10
//! horizon = 10
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::environments::EnvConfig;
use crate::solvers::{FpConfig, InitialPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Egta,
    Fp,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Egta => "egta",
            Method::Fp => "fp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_iters() -> usize {
    30
}

fn default_one() -> usize {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from(".")
}

fn default_true() -> bool {
    true
}

fn default_inner_iters() -> usize {
    FpConfig::default().max_inner_iters
}

fn default_stop_tol() -> f64 {
    FpConfig::default().stop_tol
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub methods: Vec<Method>,
    /// Outer iterations of iterative EGTA.
    #[serde(default = "default_iters")]
    pub outer_iters: usize,
    /// Iterations of full-game FP.
    #[serde(default = "default_iters")]
    pub fp_iters: usize,
    #[serde(default = "default_inner_iters")]
    pub max_inner_iters: usize,
    #[serde(default = "default_stop_tol")]
    pub stop_tol: f64,
    #[serde(default)]
    pub prior_count: u32,
    /// Deviation tolerance of the EGTA stopping check.
    #[serde(default)]
    pub epsilon: f64,
    pub seed: u64,
    #[serde(default)]
    pub initial_policy: InitialPolicy,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_one")]
    pub record_every: usize,
    /// Per-population best responses on worker threads.
    #[serde(default = "default_true")]
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |field: &str, why: &str| Err(HarnessError::Config(format!("field `{field}`: {why}")));
        if self.methods.is_empty() {
            return bad("methods", "at least one of \"egta\", \"fp\" is required");
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return bad("methods", "duplicate method");
            }
        }
        if self.outer_iters == 0 {
            return bad("outer_iters", "must be >= 1");
        }
        if self.fp_iters == 0 {
            return bad("fp_iters", "must be >= 1");
        }
        if self.record_every == 0 {
            return bad("record_every", "must be >= 1");
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return bad("epsilon", "must be >= 0");
        }
        self.fp_config()
            .validate()
            .map_err(|e| HarnessError::Config(format!("fp settings: {e}")))?;
        let env_check = match &self.env {
            EnvConfig::Beach1d(c) => c.validate(),
            EnvConfig::Beach2d(c) => c.validate(),
            EnvConfig::Chasing(c) => c.validate(),
            EnvConfig::Custom(_) => Ok(()),
        };
        env_check.map_err(|e| HarnessError::Config(format!("env: {e}")))
    }

    pub fn fp_config(&self) -> FpConfig {
        FpConfig {
            max_inner_iters: self.max_inner_iters,
            stop_tol: self.stop_tol,
            prior_count: self.prior_count,
        }
    }

    pub fn iterations(&self, method: Method) -> usize {
        match method {
            Method::Egta => self.outer_iters,
            Method::Fp => self.fp_iters,
        }
    }
}
