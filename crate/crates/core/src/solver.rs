//! Uniform front over the three solvers.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cma::{run_cma, CmaConfig};
use crate::error::{Result, TmaError};
use crate::ga::{run_tmaga, GaConfig};
use crate::grid::{grid_cell_count, grid_search, GridSpec};
use crate::objective::{BearingObjective, Candidate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Ga,
    Cma,
    Grid,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Ga => "ga",
            SolverKind::Cma => "cma",
            SolverKind::Grid => "grid",
        })
    }
}

impl FromStr for SolverKind {
    type Err = TmaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ga" | "tmaga" => Ok(SolverKind::Ga),
            "cma" | "cma-es" | "cmaes" => Ok(SolverKind::Cma),
            "grid" | "brute" => Ok(SolverKind::Grid),
            other => Err(TmaError::Config(format!("unknown solver `{other}` (expected ga, cma or grid)"))),
        }
    }
}

/// A solver together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SolverConfig {
    Ga(GaConfig),
    Cma(CmaConfig),
    Grid(GridSpec),
}

impl SolverConfig {
    pub fn kind(&self) -> SolverKind {
        match self {
            SolverConfig::Ga(_) => SolverKind::Ga,
            SolverConfig::Cma(_) => SolverKind::Cma,
            SolverConfig::Grid(_) => SolverKind::Grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SolverConfig::Ga(c) => c.validate(),
            SolverConfig::Cma(c) => c.validate(),
            SolverConfig::Grid(g) => grid_cell_count(g).map(|_| ()),
        }
    }
}

/// Range-form estimate from one solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverReport {
    pub kind: SolverKind,
    pub estimate: Candidate,
    /// Best cost the solver evaluated. For the GA this is the best inner-run
    /// cost; the weighted-average estimate itself is never evaluated.
    pub cost: f64,
    pub fevals: u64,
}

/// Runs `config` once against `objective`.
pub fn solve<R: Rng + ?Sized>(objective: &BearingObjective, config: &SolverConfig, rng: &mut R) -> Result<SolverReport> {
    let kind = config.kind();
    let report = match config {
        SolverConfig::Ga(c) => {
            let r = run_tmaga(objective, c, rng)?;
            SolverReport {
                kind,
                estimate: r.solution.to_range_form(objective.observer_start()),
                cost: r.best_cost,
                fevals: r.fevals,
            }
        }
        SolverConfig::Cma(c) => {
            let r = run_cma(objective, c, rng)?;
            SolverReport {
                kind,
                estimate: r.best,
                cost: r.best_cost,
                fevals: r.fevals,
            }
        }
        SolverConfig::Grid(g) => {
            let r = grid_search(objective, g)?;
            SolverReport {
                kind,
                estimate: r.best,
                cost: r.best_cost,
                fevals: r.fevals,
            }
        }
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_kinds() {
        assert_eq!("cma".parse::<SolverKind>().unwrap(), SolverKind::Cma);
        assert_eq!("GA".parse::<SolverKind>().unwrap(), SolverKind::Ga);
        assert_eq!("grid".parse::<SolverKind>().unwrap(), SolverKind::Grid);
        assert!("simplex".parse::<SolverKind>().is_err());
    }

    #[test]
    fn config_toml_tagging() {
        let c: SolverConfig = toml::from_str("kind = \"cma\"\nfeval_budget = 1000\n").unwrap();
        match c {
            SolverConfig::Cma(c) => {
                assert_eq!(c.feval_budget, 1000);
                assert_eq!(c.parent_size, 100);
            }
            other => panic!("{other:?}"),
        }
        let c: SolverConfig = toml::from_str("kind = \"ga\"\npopulation_size = 8\n").unwrap();
        assert_eq!(c.kind(), SolverKind::Ga);
    }
}
