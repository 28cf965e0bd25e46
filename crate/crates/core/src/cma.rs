//! CMA-ES over the normalized `(r0, course, speed)` box.
//!
//! Learning rates and the update follow the standard `(μ/μ_w, λ)` scheme with
//! cumulative step-size adaptation and combined rank-one / rank-μ covariance
//! updates. The search runs in `[0, 1]^n` so a single `sigma0` is meaningful
//! for every parameter.

use log::warn;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TmaError};
use crate::objective::{BearingObjective, Candidate, SearchBounds};

/// Smallest eigenvalue allowed in the covariance matrix.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Maps a candidate into the unit box.
pub fn normalize(c: &Candidate, bounds: &SearchBounds) -> [f64; 3] {
    let b = bounds.to_array();
    let v = c.to_array();
    std::array::from_fn(|i| (v[i] - b[i].min) / b[i].width())
}

/// Inverse of [`normalize`]; values outside the unit box map outside `bounds`.
pub fn denormalize(x: &[f64], bounds: &SearchBounds) -> Candidate {
    let b = bounds.to_array();
    Candidate::from_array(std::array::from_fn(|i| b[i].min + x[i] * b[i].width()))
}

/// Positive, non-increasing weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct RecombinationWeights {
    weights: Vec<f64>,
}

impl RecombinationWeights {
    /// `w_i ∝ ln(μ + 1/2) − ln(i)`, `i = 1..=μ`.
    pub fn log_linear(mu: usize) -> Self {
        assert!(mu >= 1, "need at least one parent");
        let raw: Vec<f64> = (1..=mu)
            .map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln())
            .collect();
        Self::normalized(raw)
    }

    /// Normalizes arbitrary positive non-increasing weights.
    pub fn from_raw(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() || raw.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(TmaError::Config("recombination weights must be positive".into()));
        }
        if raw.windows(2).any(|w| w[1] > w[0]) {
            return Err(TmaError::Config("recombination weights must be non-increasing".into()));
        }
        Ok(Self::normalized(raw))
    }

    fn normalized(raw: Vec<f64>) -> Self {
        let total: f64 = raw.iter().sum();
        Self {
            weights: raw.into_iter().map(|w| w / total).collect(),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn mu(&self) -> usize {
        self.weights.len()
    }

    /// Variance-effective selection mass `1 / Σ w_i²`.
    pub fn mu_eff(&self) -> f64 {
        1.0 / self.weights.iter().map(|w| w * w).sum::<f64>()
    }
}

/// Adaptation constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningRates {
    pub c_sigma: f64,
    pub d_sigma: f64,
    pub c_c: f64,
    pub c_1: f64,
    pub c_mu: f64,
    pub mu_eff: f64,
}

impl LearningRates {
    /// Default constants for dimension `n` and the given weights.
    pub fn defaults(n: usize, weights: &RecombinationWeights) -> Self {
        let n = n as f64;
        let mu_eff = weights.mu_eff();
        let c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (n + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        let c_1 = 2.0 / ((n + 1.3).powi(2) + mu_eff);
        let c_mu = (1.0 - c_1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0).powi(2) + mu_eff));
        Self {
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            mu_eff,
        }
    }
}

/// Expected norm of an `n`-dimensional standard normal vector (approximation).
pub fn expected_normal_norm(n: usize) -> f64 {
    let n = n as f64;
    n.sqrt() * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n))
}

/// Search distribution and evolution paths.
#[derive(Debug, Clone)]
pub struct CmaState {
    pub mean: DVector<f64>,
    pub sigma: f64,
    pub cov: DMatrix<f64>,
    pub p_sigma: DVector<f64>,
    pub p_c: DVector<f64>,
    pub generation: usize,
    eigvecs: DMatrix<f64>,
    /// Square roots of the eigenvalues of `cov`.
    axis_lengths: DVector<f64>,
    /// Number of factorization resets so far.
    pub resets: usize,
}

impl CmaState {
    pub fn new(mean: DVector<f64>, sigma: f64) -> Self {
        let n = mean.len();
        Self {
            sigma,
            cov: DMatrix::identity(n, n),
            p_sigma: DVector::zeros(n),
            p_c: DVector::zeros(n),
            generation: 0,
            eigvecs: DMatrix::identity(n, n),
            axis_lengths: DVector::from_element(n, 1.0),
            mean,
            resets: 0,
        }
    }

    /// State with an explicit covariance.
    pub fn with_covariance(mean: DVector<f64>, sigma: f64, cov: DMatrix<f64>) -> Self {
        let mut s = Self::new(mean, sigma);
        s.cov = cov;
        s.refactor();
        s
    }

    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    /// Largest standard deviation along a principal axis, `σ·sqrt(λ_max)`.
    pub fn max_axis_std(&self) -> f64 {
        self.sigma * self.axis_lengths.max()
    }

    fn reset(&mut self, why: &str) {
        warn!("cma: resetting covariance after {why}");
        let n = self.dimension();
        self.cov = DMatrix::identity(n, n);
        self.eigvecs = DMatrix::identity(n, n);
        self.axis_lengths = DVector::from_element(n, 1.0);
        self.p_c = DVector::zeros(n);
        self.p_sigma = DVector::zeros(n);
        self.resets += 1;
    }

    /// Symmetrizes `cov`, floors its eigenvalues and caches the factor.
    fn refactor(&mut self) {
        if self.cov.iter().any(|v| !v.is_finite()) {
            self.reset("non-finite covariance");
            return;
        }
        let sym = (&self.cov + self.cov.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym.clone());
        if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
            self.reset("failed eigendecomposition");
            return;
        }
        let floored = eig.eigenvalues.map(|v| v.max(EIGENVALUE_FLOOR));
        if floored != eig.eigenvalues {
            let d = DMatrix::from_diagonal(&floored);
            let rebuilt = &eig.eigenvectors * d * eig.eigenvectors.transpose();
            self.cov = (&rebuilt + rebuilt.transpose()) * 0.5;
        } else {
            self.cov = sym;
        }
        self.axis_lengths = floored.map(f64::sqrt);
        self.eigvecs = eig.eigenvectors;
    }

    fn inv_sqrt_cov(&self) -> DMatrix<f64> {
        let inv = DMatrix::from_diagonal(&self.axis_lengths.map(|d| 1.0 / d));
        &self.eigvecs * inv * self.eigvecs.transpose()
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let n = self.dimension();
        let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let scaled = z.component_mul(&self.axis_lengths);
        &self.mean + (&self.eigvecs * scaled) * self.sigma
    }
}

fn in_unit_box(x: &DVector<f64>) -> bool {
    x.iter().all(|v| (0.0..=1.0).contains(v))
}

/// Boundary treatment for [`cma_sample`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxRepair {
    /// Leave samples where they fall.
    None,
    /// Redraw out-of-box samples up to this many times, then clamp.
    ResampleThenClamp(usize),
}

/// `λ` draws of `m + σ·N(0, C)`.
pub fn cma_sample<R: Rng + ?Sized>(state: &CmaState, lambda: usize, repair: BoxRepair, rng: &mut R) -> Vec<DVector<f64>> {
    (0..lambda)
        .map(|_| {
            let mut x = state.draw(rng);
            if let BoxRepair::ResampleThenClamp(tries) = repair {
                let mut left = tries;
                while !in_unit_box(&x) && left > 0 {
                    x = state.draw(rng);
                    left -= 1;
                }
                x.apply(|v| *v = v.clamp(0.0, 1.0));
            }
            x
        })
        .collect()
}

/// Weighted mean of the best `μ` samples (sorted best first).
pub fn cma_recombine(sorted: &[DVector<f64>], weights: &RecombinationWeights) -> Result<DVector<f64>> {
    if sorted.len() < weights.mu() {
        return Err(TmaError::LengthMismatch {
            left: sorted.len(),
            right: weights.mu(),
        });
    }
    let mut mean = DVector::zeros(sorted[0].len());
    for (x, w) in sorted.iter().zip(weights.as_slice()) {
        mean.axpy(*w, x, 1.0);
    }
    Ok(mean)
}

/// One adaptation step from samples sorted best first.
pub fn cma_update(
    state: &mut CmaState,
    sorted: &[DVector<f64>],
    weights: &RecombinationWeights,
    rates: &LearningRates,
) -> Result<()> {
    let n = state.dimension();
    let old_mean = state.mean.clone();
    let new_mean = cma_recombine(sorted, weights)?;
    let sigma = state.sigma;
    let y_w = (&new_mean - &old_mean) / sigma;

    let c_s = rates.c_sigma;
    let inv_sqrt = state.inv_sqrt_cov();
    state.p_sigma = &state.p_sigma * (1.0 - c_s) + (&inv_sqrt * &y_w) * (c_s * (2.0 - c_s) * rates.mu_eff).sqrt();

    state.generation += 1;
    let chi_n = expected_normal_norm(n);
    let ps_norm = state.p_sigma.norm();
    let decay = (1.0 - (1.0 - c_s).powi(2 * state.generation as i32)).sqrt();
    let h_sigma = if ps_norm / decay < (1.4 + 2.0 / (n as f64 + 1.0)) * chi_n {
        1.0
    } else {
        0.0
    };

    let c_c = rates.c_c;
    state.p_c = &state.p_c * (1.0 - c_c) + &y_w * (h_sigma * (c_c * (2.0 - c_c) * rates.mu_eff).sqrt());

    let delta_h = (1.0 - h_sigma) * c_c * (2.0 - c_c);
    let mut rank_mu = DMatrix::zeros(n, n);
    for (x, w) in sorted.iter().zip(weights.as_slice()) {
        let y = (x - &old_mean) / sigma;
        rank_mu += (&y * y.transpose()) * *w;
    }
    let rank_one = &state.p_c * state.p_c.transpose();
    let keep = 1.0 + rates.c_1 * delta_h - rates.c_1 - rates.c_mu;
    state.cov = &state.cov * keep + rank_one * rates.c_1 + rank_mu * rates.c_mu;

    state.sigma = sigma * ((c_s / rates.d_sigma) * (ps_norm / chi_n - 1.0)).exp();
    state.mean = new_mean;

    if !(state.sigma.is_finite() && state.sigma > 0.0) || state.mean.iter().any(|v| !v.is_finite()) {
        state.mean = old_mean;
        state.sigma = sigma;
        state.reset("non-finite step size or mean");
        return Ok(());
    }
    state.refactor();
    Ok(())
}

/// CMA-ES parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CmaConfig {
    pub dimension: usize,
    /// μ
    pub parent_size: usize,
    /// λ
    pub offspring_size: usize,
    pub max_generations: usize,
    pub feval_budget: u64,
    pub bounds: SearchBounds,
    /// Initial step size in normalized coordinates.
    pub sigma0: f64,
    pub seed: u64,
    /// Stop once the best cost drops below this; zero disables.
    pub cost_tolerance: f64,
    /// Stop once `σ·sqrt(λ_max(C))` drops below this; zero disables.
    pub sigma_tolerance: f64,
    pub max_resamples: usize,
    /// Overrides the default adaptation constants.
    pub learning_rates: Option<LearningRates>,
    /// Keep a per-generation trace in the report.
    pub trace: bool,
}

impl Default for CmaConfig {
    fn default() -> Self {
        Self {
            dimension: 3,
            parent_size: 100,
            offspring_size: 100,
            max_generations: 50_000,
            feval_budget: 50_000,
            bounds: SearchBounds::reference(),
            sigma0: 0.3,
            seed: 0,
            cost_tolerance: 1e-8,
            sigma_tolerance: 1e-12,
            max_resamples: 10,
            learning_rates: None,
            trace: false,
        }
    }
}

impl CmaConfig {
    /// Budget is the only stopping rule.
    pub fn budget_only(self) -> Self {
        Self {
            cost_tolerance: 0.0,
            sigma_tolerance: 0.0,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(TmaError::Config(format!("cma: {m}")));
        if self.dimension != 3 {
            return bad("dimension must be 3 (r0, course, speed)");
        }
        if self.parent_size == 0 || self.parent_size > self.offspring_size {
            return bad("need 1 <= parent_size <= offspring_size");
        }
        if self.feval_budget == 0 || self.max_generations == 0 {
            return bad("feval_budget and max_generations must be positive");
        }
        if !(self.sigma0.is_finite() && self.sigma0 > 0.0) {
            return bad("sigma0 must be > 0");
        }
        self.bounds.validate()
    }

    pub fn weights(&self) -> RecombinationWeights {
        RecombinationWeights::log_linear(self.parent_size)
    }

    pub fn rates(&self) -> LearningRates {
        self.learning_rates
            .unwrap_or_else(|| LearningRates::defaults(self.dimension, &self.weights()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Budget,
    MaxGenerations,
    CostTolerance,
    SigmaTolerance,
}

/// One row of the per-generation trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub generation: usize,
    pub sigma: f64,
    pub best_cost: f64,
    pub mean_r0: f64,
    pub mean_course: f64,
    pub mean_speed: f64,
}

/// Outcome of [`run_cma`].
#[derive(Debug, Clone, PartialEq)]
pub struct CmaReport {
    pub best: Candidate,
    pub best_cost: f64,
    pub fevals: u64,
    pub generations: usize,
    pub termination: Termination,
    pub final_sigma: f64,
    /// Best-ever cost after each generation.
    pub history: Vec<f64>,
    pub trace: Vec<TraceRow>,
}

/// Minimizes the objective over `config.bounds`.
pub fn run_cma<R: Rng + ?Sized>(objective: &BearingObjective, config: &CmaConfig, rng: &mut R) -> Result<CmaReport> {
    config.validate()?;
    let weights = config.weights();
    let rates = config.rates();
    let lambda = config.offspring_size;
    let bounds = &config.bounds;
    let start = objective.fevals();

    let mut state = CmaState::new(DVector::from_element(config.dimension, 0.5), config.sigma0);
    let mut best = (Candidate::default(), f64::INFINITY);
    let mut history = Vec::new();
    let mut trace = Vec::new();

    let termination = loop {
        let used = objective.fevals() - start;
        if used + lambda as u64 > config.feval_budget {
            break Termination::Budget;
        }
        if state.generation >= config.max_generations {
            break Termination::MaxGenerations;
        }

        let samples = cma_sample(&state, lambda, BoxRepair::ResampleThenClamp(config.max_resamples), rng);
        let mut scored: Vec<(f64, DVector<f64>)> = samples
            .into_iter()
            .map(|x| (objective.evaluate(&denormalize(x.as_slice(), bounds)), x))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        if scored[0].0 < best.1 {
            best = (denormalize(scored[0].1.as_slice(), bounds), scored[0].0);
        }
        history.push(best.1);

        let sorted: Vec<DVector<f64>> = scored.into_iter().map(|(_, x)| x).collect();
        cma_update(&mut state, &sorted, &weights, &rates)?;

        if config.trace {
            let m = denormalize(state.mean.as_slice(), bounds);
            trace.push(TraceRow {
                generation: state.generation,
                sigma: state.sigma,
                best_cost: best.1,
                mean_r0: m.r0,
                mean_course: m.course,
                mean_speed: m.speed,
            });
        }

        if best.1 < config.cost_tolerance {
            break Termination::CostTolerance;
        }
        if state.max_axis_std() < config.sigma_tolerance {
            break Termination::SigmaTolerance;
        }
    };

    Ok(CmaReport {
        best: best.0,
        best_cost: best.1,
        fevals: objective.fevals() - start,
        generations: state.generation,
        termination,
        final_sigma: state.sigma,
        history,
        trace,
    })
}
