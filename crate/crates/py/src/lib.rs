//! Python bindings: `import botma`.

use botma_core::cma::{self, CmaConfig};
use botma_core::ga::{self, GaConfig};
use botma_core::grid::{self, GridSpec};
use botma_core::harness::{self, MonteCarloSummary};
use botma_core::kinematics::{synthesize_bearings, BearingSeries};
use botma_core::objective::{self, Candidate, CandidateXY};
use botma_core::{presets, BearingObjective, SolverConfig, SolverKind, TmaError};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;

fn py_err(e: TmaError) -> PyErr {
    match e {
        TmaError::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for botma_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// An engagement: observer legs, target truth, sampling and noise.
#[pyclass(name = "Scenario", module = "botma", skip_from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: botma_core::Scenario,
}

#[pymethods]
impl PyScenario {
    /// Built-in scenario `trial01`..`trial12`.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        Ok(Self {
            inner: presets::preset(name).py()?,
        })
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: presets::parse_scenario(text).py()?,
        })
    }

    fn to_toml(&self) -> PyResult<String> {
        presets::scenario_to_toml(&self.inner).py()
    }

    /// Copy with a different bearing-noise standard deviation (degrees).
    fn with_noise(&self, sigma: f64) -> PyResult<Self> {
        let inner = self.inner.with_noise(sigma);
        inner.validate().py()?;
        Ok(Self { inner })
    }

    /// `(r0, course, speed)` of the true target.
    #[getter]
    fn truth(&self) -> (f64, f64, f64) {
        let t = &self.inner.truth;
        (t.r0, t.course, t.speed)
    }

    #[getter]
    fn b0(&self) -> f64 {
        self.inner.truth.b0
    }

    #[getter]
    fn noise_sigma(&self) -> f64 {
        self.inner.noise_sigma
    }

    #[getter]
    fn n_samples(&self) -> usize {
        self.inner.n_samples
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    /// Synthesize tracks and bearings. Returns a dict with `t`, `observer`,
    /// `target` (lists of `(x, y)`), `clean` and `noisy` bearings in degrees.
    #[pyo3(signature = (seed=None))]
    fn simulate<'py>(&self, py: Python<'py>, seed: Option<u64>) -> PyResult<Bound<'py, PyDict>> {
        let seed = seed.unwrap_or(self.inner.seed);
        let obs = synthesize_bearings(&self.inner, &mut ChaCha8Rng::seed_from_u64(seed)).py()?;
        let points = |t: &botma_core::Track| t.positions.iter().map(|p| (p.x, p.y)).collect::<Vec<_>>();
        let d = PyDict::new(py);
        d.set_item("t", obs.clean.times.clone())?;
        d.set_item("observer", points(&obs.observer))?;
        d.set_item("target", points(&obs.target))?;
        d.set_item("clean", obs.clean.bearings_deg.clone())?;
        d.set_item("noisy", obs.noisy.bearings_deg.clone())?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let t = &self.inner.truth;
        format!(
            "Scenario(r0={}, b0={}, course={}, speed={}, noise_sigma={}, n_samples={})",
            t.r0, t.b0, t.course, t.speed, self.inner.noise_sigma, self.inner.n_samples
        )
    }
}

/// Counted bearing-fit objective for one noisy realization of a scenario.
#[pyclass(name = "Objective", module = "botma")]
struct PyObjective {
    inner: BearingObjective,
}

#[pymethods]
impl PyObjective {
    #[new]
    #[pyo3(signature = (scenario, seed=None))]
    fn new(scenario: &PyScenario, seed: Option<u64>) -> PyResult<Self> {
        Ok(Self {
            inner: objective_for(&scenario.inner, seed)?,
        })
    }

    /// Cost of range-form candidate `(r0, course, speed)`.
    fn evaluate(&self, r0: f64, course: f64, speed: f64) -> f64 {
        self.inner.evaluate(&Candidate::new(r0, course, speed))
    }

    /// Cost of position-form candidate `(x0, y0, course, speed)`.
    fn evaluate_xy(&self, x0: f64, y0: f64, course: f64, speed: f64) -> f64 {
        self.inner.evaluate_xy(&CandidateXY::new(x0, y0, course, speed))
    }

    #[getter]
    fn fevals(&self) -> u64 {
        self.inner.fevals()
    }

    #[getter]
    fn anchor_bearing(&self) -> f64 {
        self.inner.anchor_bearing()
    }
}

fn objective_for(s: &botma_core::Scenario, seed: Option<u64>) -> PyResult<BearingObjective> {
    let obs = synthesize_bearings(s, &mut ChaCha8Rng::seed_from_u64(seed.unwrap_or(s.seed))).py()?;
    BearingObjective::new(&obs.noisy, &obs.observer).py()
}

fn series(values: Vec<f64>) -> BearingSeries {
    BearingSeries {
        times: (0..values.len()).map(|i| i as f64).collect(),
        bearings_deg: values,
    }
}

fn toml_from_str<T: DeserializeOwned>(text: &str) -> PyResult<T> {
    toml::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn parse_toml<T: DeserializeOwned + Default>(text: Option<&str>) -> PyResult<T> {
    text.map_or_else(|| Ok(T::default()), toml_from_str)
}

/// Smallest bit count encoding `[min, max]` at `precision` decimal digits.
#[pyfunction]
fn bit_width(max: f64, min: f64, precision: u32) -> PyResult<u32> {
    ga::bit_width(max, min, precision).py()
}

/// Cells of the reference grid, or of the coarse grid when `coarse` is true.
#[pyfunction]
#[pyo3(signature = (coarse=false))]
fn grid_cell_count(coarse: bool) -> PyResult<u64> {
    let spec = if coarse { GridSpec::coarse() } else { GridSpec::reference() };
    grid::grid_cell_count(&spec).py()
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    presets::preset_names().collect()
}

/// Wrapped Euclidean bearing misfit.
#[pyfunction]
fn cost_euclidean(predicted: Vec<f64>, observed: Vec<f64>) -> PyResult<f64> {
    Ok(objective::cost_euclidean(&series(predicted), &series(observed)).py()?.value)
}

/// Literal `Σ sqrt(m² − g²)`; returns `(value, undefined_count)`.
#[pyfunction]
fn cost_nonmetric(predicted: Vec<f64>, observed: Vec<f64>) -> PyResult<(f64, usize)> {
    let c = objective::cost_total_deviation_nonmetric(&series(predicted), &series(observed)).py()?;
    Ok((c.value, c.undefined_count))
}

fn estimate_dict<'py>(py: Python<'py>, r0: f64, course: f64, speed: f64, cost: f64, fevals: u64) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("r0", r0)?;
    d.set_item("course", course)?;
    d.set_item("speed", speed)?;
    d.set_item("cost", cost)?;
    d.set_item("fevals", fevals)?;
    Ok(d)
}

/// CMA-ES on one realization. `config` is a TOML table of CMA-ES parameters.
#[pyfunction]
#[pyo3(signature = (scenario, seed=0, config=None))]
fn run_cma<'py>(py: Python<'py>, scenario: &PyScenario, seed: u64, config: Option<&str>) -> PyResult<Bound<'py, PyDict>> {
    let cfg: CmaConfig = parse_toml(config)?;
    let objective = objective_for(&scenario.inner, None)?;
    let rep = py
        .detach(|| cma::run_cma(&objective, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)))
        .py()?;
    let d = estimate_dict(py, rep.best.r0, rep.best.course, rep.best.speed, rep.best_cost, rep.fevals)?;
    d.set_item("generations", rep.generations)?;
    d.set_item("sigma", rep.final_sigma)?;
    d.set_item("termination", format!("{:?}", rep.termination))?;
    d.set_item("history", rep.history)?;
    Ok(d)
}

/// One TMAGA outer run. `config` is a TOML table of GA parameters.
#[pyfunction]
#[pyo3(signature = (scenario, seed=0, config=None))]
fn run_tmaga<'py>(py: Python<'py>, scenario: &PyScenario, seed: u64, config: Option<&str>) -> PyResult<Bound<'py, PyDict>> {
    let cfg: GaConfig = parse_toml(config)?;
    let objective = objective_for(&scenario.inner, None)?;
    let rep = py
        .detach(|| ga::run_tmaga(&objective, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)))
        .py()?;
    let est = rep.solution.to_range_form(objective.observer_start());
    let d = estimate_dict(py, est.r0, est.course, est.speed, rep.best_cost, rep.fevals)?;
    let b = rep.best;
    d.set_item("best_xy", (b.x0, b.y0, b.course, b.speed))?;
    let s = rep.solution;
    d.set_item("solution_xy", (s.x0, s.y0, s.course, s.speed))?;
    d.set_item("inner_costs", rep.inner.iter().map(|r| r.cost).collect::<Vec<_>>())?;
    Ok(d)
}

/// Exhaustive search over the coarse (default) or reference grid.
#[pyfunction]
#[pyo3(signature = (scenario, full=false))]
fn grid_search<'py>(py: Python<'py>, scenario: &PyScenario, full: bool) -> PyResult<Bound<'py, PyDict>> {
    let spec = if full { GridSpec::reference() } else { GridSpec::coarse() };
    let objective = objective_for(&scenario.inner, None)?;
    let rep = py.detach(|| grid::grid_search(&objective, &spec)).py()?;
    let d = estimate_dict(py, rep.best.r0, rep.best.course, rep.best.speed, rep.best_cost, rep.fevals)?;
    d.set_item("index", rep.best_index)?;
    Ok(d)
}

fn summary_dict<'py>(py: Python<'py>, s: &MonteCarloSummary) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (name, p) in ["r0", "course", "speed"].into_iter().zip(s.stats()) {
        let row = PyDict::new(py);
        row.set_item("mean", p.mean)?;
        row.set_item("std", p.std)?;
        row.set_item("abs_dev", p.abs_dev)?;
        d.set_item(name, row)?;
    }
    d.set_item("runs", s.runs)?;
    d.set_item("total_fevals", s.total_fevals)?;
    d.set_item("noise_sigma", s.noise_sigma)?;
    d.set_item(
        "records",
        s.records
            .iter()
            .map(|r| (r.r, r.course, r.speed, r.cost, r.fevals))
            .collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// Monte Carlo summary of `runs` independent solves with solver `"cma"`,
/// `"ga"` or `"grid"`; `config` is a TOML table of that solver's parameters.
#[pyfunction]
#[pyo3(signature = (scenario, solver="cma", runs=100, master_seed=0, config=None))]
fn run_monte_carlo<'py>(
    py: Python<'py>,
    scenario: &PyScenario,
    solver: &str,
    runs: usize,
    master_seed: u64,
    config: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = match solver.parse::<SolverKind>().py()? {
        SolverKind::Cma => SolverConfig::Cma(parse_toml(config)?),
        SolverKind::Ga => SolverConfig::Ga(parse_toml(config)?),
        SolverKind::Grid => SolverConfig::Grid(match config {
            Some(t) => toml_from_str(t)?,
            None => GridSpec::coarse(),
        }),
    };
    let s = scenario.inner.clone();
    let summary = py
        .detach(|| harness::run_monte_carlo(&cfg, &s, runs, master_seed))
        .py()?;
    summary_dict(py, &summary)
}

#[pymodule]
fn botma(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyObjective>()?;
    m.add_function(wrap_pyfunction!(bit_width, m)?)?;
    m.add_function(wrap_pyfunction!(grid_cell_count, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(cost_euclidean, m)?)?;
    m.add_function(wrap_pyfunction!(cost_nonmetric, m)?)?;
    m.add_function(wrap_pyfunction!(run_cma, m)?)?;
    m.add_function(wrap_pyfunction!(run_tmaga, m)?)?;
    m.add_function(wrap_pyfunction!(grid_search, m)?)?;
    m.add_function(wrap_pyfunction!(run_monte_carlo, m)?)?;
    Ok(())
}
