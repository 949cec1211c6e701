//! Experiment runner behind the `mfg-egta` binary.
//!
//! `solve` reads an [`ExperimentConfig`], runs the requested methods from a
//! shared seeded initial profile and writes `trace.csv`, `profile.json` and
//! `chart.svg` into the configured output directory.

pub mod chart;
pub mod config;
pub mod profile;
pub mod trace_csv;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{ExperimentConfig, Method};
pub use profile::{MethodProfile, Profile};
pub use trace_csv::TraceRow;

use crate::concurrency::Concurrency;
use crate::model::TabularMfg;
use crate::response::{exploitability_with, RegretReport};
use crate::solvers::{full_fp, initial_strategies, iterative_egta, SolveTrace};

pub const TRACE_FILE: &str = "trace.csv";
pub const PROFILE_FILE: &str = "profile.json";
pub const CHART_FILE: &str = "chart.svg";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    /// Unreadable or inconsistent input files (profile, trace).
    #[error("input error: {0}")]
    Input(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Input(_) => 2,
            HarnessError::Runtime(_) => 3,
        }
    }
}

/// Result of one method inside a run.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub trace: SolveTrace<f64>,
    pub profile: MethodProfile,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub runs: Vec<MethodRun>,
}

impl RunSummary {
    pub fn trace_path(&self) -> PathBuf {
        self.output_dir.join(TRACE_FILE)
    }

    pub fn profile_path(&self) -> PathBuf {
        self.output_dir.join(PROFILE_FILE)
    }

    pub fn chart_path(&self) -> PathBuf {
        self.output_dir.join(CHART_FILE)
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> HarnessError {
    HarnessError::Runtime(e.to_string())
}

pub fn build_game(cfg: &ExperimentConfig) -> Result<TabularMfg<f64>, HarnessError> {
    cfg.env
        .build::<f64>()
        .map_err(|e| HarnessError::Config(format!("env ({}): {e}", cfg.env.kind())))
}

fn concurrency_for(cfg: &ExperimentConfig) -> Concurrency {
    if cfg.parallel {
        Concurrency::from_env()
    } else {
        Concurrency::sequential()
    }
}

/// Runs every configured method in memory; nothing is written.
pub fn execute(cfg: &ExperimentConfig) -> Result<Vec<MethodRun>, HarnessError> {
    let game = build_game(cfg)?;
    let conc = concurrency_for(cfg);
    let mut runs = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let initial = initial_strategies(&game, cfg.initial_policy, cfg.seed);
        let iters = cfg.iterations(method);
        let (trace, empirical, mixtures, certificate) = match method {
            Method::Egta => {
                let out = iterative_egta(&game, initial, iters, &cfg.fp_config(), cfg.epsilon, &conc)
                    .map_err(runtime)?;
                (out.trace, out.empirical, out.mixtures, Some(out.certificate))
            }
            Method::Fp => {
                let out = full_fp(&game, initial, iters, cfg.record_every, &conc).map_err(runtime)?;
                (out.trace, out.history, out.mixtures, None)
            }
        };
        let report: RegretReport<f64> =
            exploitability_with(&mixtures, &empirical, &game, &conc).map_err(runtime)?;
        let iterations = trace.last().map_or(0, |r| r.iteration);
        let profile = MethodProfile::new(method, iterations, &empirical, &mixtures, certificate, report);
        runs.push(MethodRun {
            method,
            trace,
            profile,
        });
    }
    Ok(runs)
}

fn render_trace(runs: &[MethodRun]) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    buf.extend_from_slice(trace_csv::HEADER.as_bytes());
    buf.push(b'\n');
    for r in runs {
        trace_csv::write_trace(&mut buf, r.method, &r.trace).map_err(runtime)?;
    }
    String::from_utf8(buf).map_err(runtime)
}

fn write_outputs(dir: &Path, files: &[(&str, String)], written: &mut Vec<PathBuf>) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| runtime(format!("{}: {e}", dir.display())))?;
    for (name, body) in files {
        let path = dir.join(name);
        written.push(path.clone());
        fs::write(&path, body).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// `solve <config>`: runs the experiment and writes its artifacts.
///
/// On failure any file this call started writing is removed.
pub fn run(config_path: &Path) -> Result<RunSummary, HarnessError> {
    let cfg = ExperimentConfig::load(config_path)?;
    let runs = execute(&cfg)?;
    let trace = render_trace(&runs)?;
    let rows = trace_csv::read_trace(&trace).map_err(runtime)?;
    let svg = chart::render_svg(&rows).map_err(runtime)?;
    let mut profile = Profile::new(cfg.clone());
    profile.methods = runs.iter().map(|r| r.profile.clone()).collect();

    let files = [
        (TRACE_FILE, trace),
        (PROFILE_FILE, profile.to_json()),
        (CHART_FILE, svg),
    ];
    let mut written = Vec::new();
    if let Err(e) = write_outputs(&cfg.output_dir, &files, &mut written) {
        for p in written {
            let _ = fs::remove_file(p);
        }
        return Err(e);
    }
    Ok(RunSummary {
        output_dir: cfg.output_dir,
        runs,
    })
}

/// `exploitability <profile> <config>`: recomputes every stored method's report.
pub fn exploitability_cmd(
    profile_path: &Path,
    config_path: &Path,
) -> Result<Vec<(Method, RegretReport<f64>)>, HarnessError> {
    let cfg = ExperimentConfig::load(config_path)?;
    let game = build_game(&cfg)?;
    let profile = Profile::load(profile_path)?;
    if profile.methods.is_empty() {
        return Err(HarnessError::Input("profile holds no methods".into()));
    }
    let conc = concurrency_for(&cfg);
    profile
        .methods
        .iter()
        .map(|m| Ok((m.method, m.recompute(&game, &conc)?)))
        .collect()
}

/// `chart <trace.csv> <out.svg>`.
pub fn chart_cmd(trace_path: &Path, out_path: &Path) -> Result<(), HarnessError> {
    let text = fs::read_to_string(trace_path)
        .map_err(|e| HarnessError::Input(format!("{}: {e}", trace_path.display())))?;
    let rows = trace_csv::read_trace(&text)?;
    let svg = chart::render_svg(&rows)?;
    fs::write(out_path, svg).map_err(|e| runtime(format!("{}: {e}", out_path.display())))
}
