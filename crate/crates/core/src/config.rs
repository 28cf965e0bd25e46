//! Experiment configuration file (TOML).
//!
//! ```toml
//! solver = "cma"
//!
//! [scenario]
//! preset = "trial07"          # or: path = "my_scenario.toml"
//!
//! [cma]
//! feval_budget = 50000
//!
//! [harness]
//! runs = 100
//! master_seed = 1
//! sigmas = [0.0, 0.5, 1.0, 2.0]
//!
//! [harness.thresholds]
//! range_std_non_decreasing = true
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Every section is optional; `[ga]`, `[cma]` and `[grid]` hold the
//! parameters of the matching solver and only the one selected by `solver`
//! is used.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cma::CmaConfig;
use crate::error::{Result, TmaError};
use crate::ga::GaConfig;
use crate::grid::GridSpec;
use crate::harness::Thresholds;
use crate::kinematics::Scenario;
use crate::presets;
use crate::solver::{SolverConfig, SolverKind};

/// Where the scenario comes from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSource {
    pub preset: Option<String>,
    pub path: Option<PathBuf>,
}

impl ScenarioSource {
    /// Loads the scenario; relative paths resolve against `base_dir`.
    pub fn load(&self, base_dir: Option<&Path>) -> Result<Scenario> {
        match (&self.preset, &self.path) {
            (Some(_), Some(_)) => Err(TmaError::Config("give either a preset or a scenario path, not both".into())),
            (Some(name), None) => presets::preset(name),
            (None, Some(p)) => {
                let full = match base_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p.clone(),
                };
                presets::load_scenario(&full)
            }
            (None, None) => Err(TmaError::Config("no scenario given (use a preset or a path)".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarnessConfig {
    /// Monte Carlo runs per summary.
    pub runs: usize,
    pub master_seed: u64,
    pub sigmas: Vec<f64>,
    pub thresholds: Option<Thresholds>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            runs: 100,
            master_seed: 0,
            sigmas: vec![0.0, 0.5, 1.0, 2.0],
            thresholds: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub solver: SolverKind,
    pub scenario: ScenarioSource,
    pub ga: GaConfig,
    pub cma: CmaConfig,
    pub grid: GridSpec,
    pub harness: HarnessConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            solver: SolverKind::Cma,
            scenario: ScenarioSource::default(),
            ga: GaConfig::default(),
            cma: CmaConfig::default(),
            grid: GridSpec::coarse(),
            harness: HarnessConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parameters of solver `kind` from this config.
    pub fn solver_config(&self, kind: SolverKind) -> SolverConfig {
        match kind {
            SolverKind::Ga => SolverConfig::Ga(self.ga.clone()),
            SolverKind::Cma => SolverConfig::Cma(self.cma.clone()),
            SolverKind::Grid => SolverConfig::Grid(self.grid),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_documented_example() {
        let text = r#"
solver = "cma"

[scenario]
preset = "trial07"

[cma]
feval_budget = 20000

[harness]
runs = 20
master_seed = 1
sigmas = [0.0, 0.5]

[harness.thresholds]
range_std_non_decreasing = true

[harness.thresholds.max_std]
r = 10.0
"#;
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.solver, SolverKind::Cma);
        assert_eq!(c.cma.feval_budget, 20_000);
        assert_eq!(c.cma.offspring_size, 100);
        assert_eq!(c.harness.runs, 20);
        let t = c.harness.thresholds.as_ref().unwrap();
        assert!(t.range_std_non_decreasing);
        assert_eq!(t.max_std.r, Some(10.0));
        assert_eq!(c.scenario.load(None).unwrap().truth.r0, 4006.0);
    }

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        let text = c.to_toml().unwrap();
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), c);
    }

    #[test]
    fn scenario_source_errors() {
        assert!(ScenarioSource::default().load(None).is_err());
        let both = ScenarioSource {
            preset: Some("trial01".into()),
            path: Some("x.toml".into()),
        };
        assert!(both.load(None).is_err());
    }
}
