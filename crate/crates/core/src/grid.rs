//! Exhaustive search over a regular `(r0, course, speed)` lattice.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TmaError};
use crate::objective::{BearingObjective, Candidate};

/// Half-open axis `[min, max)` sampled every `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridAxis {
    pub const fn new(min: f64, max: f64, step: f64) -> Self {
        Self { min, max, step }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite()) {
            return Err(TmaError::Config(format!("grid axis {name}: values must be finite")));
        }
        if self.step <= 0.0 || self.max <= self.min {
            return Err(TmaError::Config(format!(
                "grid axis {name}: need step > 0 and max > min (got [{}, {}) step {})",
                self.min, self.max, self.step
            )));
        }
        Ok(())
    }

    /// Number of points `min + i*step < max`.
    pub fn count(&self) -> u64 {
        let ratio = (self.max - self.min) / self.step;
        let nearest = ratio.round();
        // 25 / 0.1 lands a hair off 250
        if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest as u64
        } else {
            ratio.ceil() as u64
        }
    }

    pub fn value(&self, i: u64) -> f64 {
        self.min + i as f64 * self.step
    }
}

/// Lattice over the range form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r0: GridAxis,
    pub course: GridAxis,
    pub speed: GridAxis,
}

impl GridSpec {
    /// R [0, 28000) step 100, C [0, 360) step 0.5, S [0, 25) step 0.1.
    pub const fn reference() -> Self {
        Self {
            r0: GridAxis::new(0.0, 28_000.0, 100.0),
            course: GridAxis::new(0.0, 360.0, 0.5),
            speed: GridAxis::new(0.0, 25.0, 0.1),
        }
    }

    /// 28 x 36 x 25 lattice over the reference box.
    pub const fn coarse() -> Self {
        Self {
            r0: GridAxis::new(0.0, 28_000.0, 1000.0),
            course: GridAxis::new(0.0, 360.0, 10.0),
            speed: GridAxis::new(0.0, 25.0, 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.r0.validate("r0")?;
        self.course.validate("course")?;
        self.speed.validate("speed")
    }

    pub fn counts(&self) -> [u64; 3] {
        [self.r0.count(), self.course.count(), self.speed.count()]
    }

    /// Candidate at a linear index (R-major, then course, then speed).
    pub fn candidate(&self, index: u64) -> Candidate {
        let [_, nc, ns] = self.counts();
        let s = index % ns;
        let c = (index / ns) % nc;
        let r = index / (ns * nc);
        Candidate::new(self.r0.value(r), self.course.value(c), self.speed.value(s))
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::coarse()
    }
}

/// Total number of lattice points.
pub fn grid_cell_count(spec: &GridSpec) -> Result<u64> {
    spec.validate()?;
    spec.counts()
        .iter()
        .try_fold(1u64, |acc, n| acc.checked_mul(*n))
        .ok_or_else(|| TmaError::Config("grid cell count overflows u64".into()))
}

/// Outcome of [`grid_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub best: Candidate,
    pub best_cost: f64,
    pub best_index: u64,
    pub fevals: u64,
}

fn better(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => {
            if a.1 <= b.1 {
                a
            } else {
                b
            }
        }
    }
}

/// Evaluates every cell; ties go to the lowest linear index regardless of how
/// rayon partitions the work.
pub fn grid_search(objective: &BearingObjective, spec: &GridSpec) -> Result<GridReport> {
    let cells = grid_cell_count(spec)?;
    let start = objective.fevals();
    let (best_cost, best_index) = (0..cells)
        .into_par_iter()
        .map(|i| (objective.evaluate(&spec.candidate(i)), i))
        .reduce(|| (f64::INFINITY, u64::MAX), better);
    Ok(GridReport {
        best: spec.candidate(best_index),
        best_cost,
        best_index,
        fevals: objective.fevals() - start,
    })
}

/// Largest grid [`write_cost_volume`] will dump.
pub const MAX_DUMP_CELLS: u64 = 1_000_000;

/// Writes `index,r0,course,speed,cost` for every cell.
pub fn write_cost_volume<W: Write>(objective: &BearingObjective, spec: &GridSpec, out: W) -> Result<()> {
    let cells = grid_cell_count(spec)?;
    if cells >= MAX_DUMP_CELLS {
        return Err(TmaError::Config(format!(
            "cost-volume dump limited to fewer than {MAX_DUMP_CELLS} cells (grid has {cells})"
        )));
    }
    let costs: Vec<f64> = (0..cells)
        .into_par_iter()
        .map(|i| objective.evaluate(&spec.candidate(i)))
        .collect();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "r0", "course", "speed", "cost"])?;
    for (i, cost) in costs.iter().enumerate() {
        let c = spec.candidate(i as u64);
        w.write_record(&[
            i.to_string(),
            c.r0.to_string(),
            c.course.to_string(),
            c.speed.to_string(),
            cost.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
