//! Monte Carlo runs, noise sweeps and solver comparisons.
//!
//! Each run synthesizes a fresh noise realization and uses a fresh solver
//! stream, both drawn from [`seeding::run_streams`]. Runs execute on the
//! rayon pool and are reduced in run-index order, so results do not depend on
//! the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TmaError};
use crate::kinematics::{synthesize_bearings, Scenario};
use crate::objective::{BearingObjective, Candidate};
use crate::seeding;
use crate::solver::{solve, SolverConfig, SolverKind};

/// One Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunRecord {
    pub run: usize,
    pub r: f64,
    pub course: f64,
    pub speed: f64,
    pub cost: f64,
    pub fevals: u64,
}

/// Mean, sample standard deviation and `|mean − truth|` of one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamStats {
    pub mean: f64,
    pub std: f64,
    pub abs_dev: f64,
}

impl ParamStats {
    /// `std` uses the `n − 1` denominator and is zero for a single value.
    pub fn from_values(values: &[f64], truth: f64) -> Self {
        assert!(!values.is_empty(), "statistics of an empty sample");
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Self {
            mean,
            std,
            abs_dev: (mean - truth).abs(),
        }
    }
}

/// Per-parameter statistics over `runs` Monte Carlo runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub r: ParamStats,
    pub course: ParamStats,
    pub speed: ParamStats,
    pub runs: usize,
    pub total_fevals: u64,
    pub truth: Candidate,
    pub noise_sigma: f64,
    pub records: Vec<RunRecord>,
}

impl MonteCarloSummary {
    pub fn from_records(records: Vec<RunRecord>, truth: Candidate, noise_sigma: f64) -> Self {
        let col = |f: fn(&RunRecord) -> f64| records.iter().map(f).collect::<Vec<_>>();
        Self {
            r: ParamStats::from_values(&col(|r| r.r), truth.r0),
            course: ParamStats::from_values(&col(|r| r.course), truth.course),
            speed: ParamStats::from_values(&col(|r| r.speed), truth.speed),
            runs: records.len(),
            total_fevals: records.iter().map(|r| r.fevals).sum(),
            truth,
            noise_sigma,
            records,
        }
    }

    pub fn stats(&self) -> [ParamStats; 3] {
        [self.r, self.course, self.speed]
    }
}

fn truth_of(scenario: &Scenario) -> Candidate {
    Candidate::new(scenario.truth.r0, scenario.truth.course, scenario.truth.speed)
}

/// Run `run` of a Monte Carlo experiment.
pub fn run_once(solver: &SolverConfig, scenario: &Scenario, run: usize, master_seed: u64) -> Result<RunRecord> {
    let (mut noise_rng, mut solver_rng) = seeding::run_streams(master_seed, run as u64);
    let obs = synthesize_bearings(scenario, &mut noise_rng)?;
    let objective = BearingObjective::new(&obs.noisy, &obs.observer)?;
    let report = solve(&objective, solver, &mut solver_rng)?;
    debug_assert_eq!(report.fevals, objective.fevals());
    Ok(RunRecord {
        run,
        r: report.estimate.r0,
        course: report.estimate.course,
        speed: report.estimate.speed,
        cost: report.cost,
        fevals: objective.fevals(),
    })
}

/// `m` independent runs summarized.
pub fn run_monte_carlo(solver: &SolverConfig, scenario: &Scenario, m: usize, master_seed: u64) -> Result<MonteCarloSummary> {
    if m == 0 {
        return Err(TmaError::Config("Monte Carlo needs at least one run".into()));
    }
    scenario.validate()?;
    solver.validate()?;
    let records = (0..m)
        .into_par_iter()
        .map(|k| run_once(solver, scenario, k, master_seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonteCarloSummary::from_records(records, truth_of(scenario), scenario.noise_sigma))
}

/// Summaries at increasing noise levels over one geometry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<(f64, MonteCarloSummary)>,
}

pub fn noise_sweep(
    solver: &SolverConfig,
    base: &Scenario,
    sigmas: &[f64],
    m: usize,
    master_seed: u64,
) -> Result<SweepResult> {
    if sigmas.is_empty() {
        return Err(TmaError::Config("sweep needs at least one noise level".into()));
    }
    if sigmas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TmaError::Config("sweep noise levels must be strictly increasing".into()));
    }
    let rows = sigmas
        .iter()
        .map(|&sigma| Ok((sigma, run_monte_carlo(solver, &base.with_noise(sigma), m, master_seed)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows })
}

/// One solver's line in a comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub kind: SolverKind,
    pub summary: MonteCarloSummary,
}

impl ComparisonRow {
    /// Mean evaluations per run.
    pub fn fevals_per_run(&self) -> f64 {
        self.summary.total_fevals as f64 / self.summary.runs as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn row(&self, label: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Total evaluations of `numerator` over those of `denominator`.
    pub fn feval_ratio(&self, numerator: &str, denominator: &str) -> Option<f64> {
        let n = self.row(numerator)?.summary.total_fevals as f64;
        let d = self.row(denominator)?.summary.total_fevals as f64;
        (d > 0.0).then(|| n / d)
    }
}

/// Runs every labelled solver on the same `m` noise realizations.
pub fn compare_solvers(
    scenario: &Scenario,
    configs: &[(String, SolverConfig)],
    m: usize,
    master_seed: u64,
) -> Result<Comparison> {
    if configs.len() < 2 {
        return Err(TmaError::Config("comparison needs at least two solvers".into()));
    }
    let rows = configs
        .iter()
        .map(|(label, cfg)| {
            Ok(ComparisonRow {
                label: label.clone(),
                kind: cfg.kind(),
                summary: run_monte_carlo(cfg, scenario, m, master_seed)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Comparison { rows })
}

/// Optional per-parameter ceilings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamLimits {
    pub r: Option<f64>,
    pub course: Option<f64>,
    pub speed: Option<f64>,
}

impl ParamLimits {
    fn as_array(&self) -> [Option<f64>; 3] {
        [self.r, self.course, self.speed]
    }
}

/// Pass/fail limits embedded in an experiment config.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub max_abs_dev: ParamLimits,
    pub max_std: ParamLimits,
    /// Range std must not decrease as noise grows (sweeps only).
    pub range_std_non_decreasing: bool,
}

const PARAM_NAMES: [&str; 3] = ["r", "course", "speed"];

impl Thresholds {
    /// Human-readable violations; empty when everything passes.
    pub fn check_summary(&self, s: &MonteCarloSummary) -> Vec<String> {
        let mut out = Vec::new();
        for ((name, stats), (dev, std)) in PARAM_NAMES
            .iter()
            .zip(s.stats())
            .zip(self.max_abs_dev.as_array().into_iter().zip(self.max_std.as_array()))
        {
            if let Some(limit) = dev {
                if stats.abs_dev > limit {
                    out.push(format!(
                        "noise {}: |Dev| of {name} = {} exceeds {limit}",
                        s.noise_sigma, stats.abs_dev
                    ));
                }
            }
            if let Some(limit) = std {
                if stats.std > limit {
                    out.push(format!("noise {}: std of {name} = {} exceeds {limit}", s.noise_sigma, stats.std));
                }
            }
        }
        out
    }

    pub fn check_sweep(&self, sweep: &SweepResult) -> Vec<String> {
        let mut out: Vec<String> = sweep.rows.iter().flat_map(|(_, s)| self.check_summary(s)).collect();
        if self.range_std_non_decreasing {
            for w in sweep.rows.windows(2) {
                if w[1].1.r.std < w[0].1.r.std {
                    out.push(format!(
                        "range std decreased from {} (noise {}) to {} (noise {})",
                        w[0].1.r.std, w[0].0, w[1].1.r.std, w[1].0
                    ));
                }
            }
        }
        out
    }
}
