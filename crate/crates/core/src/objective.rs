//! Candidate hypotheses, bearing cost functions and the counted objective
//! shared by every solver.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TmaError};
use crate::kinematics::{advance, initial_target_position, wrap_360, BearingSeries, Point, Track};

/// Cost assigned to geometrically infeasible candidates (track through the
/// observer, non-positive range), in degrees.
pub const INFEASIBLE_PENALTY: f64 = 1e9;

/// Range / course / speed hypothesis anchored on the first observed bearing.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Candidate {
    pub r0: f64,
    pub course: f64,
    pub speed: f64,
}

impl Candidate {
    pub const fn new(r0: f64, course: f64, speed: f64) -> Self {
        Self { r0, course, speed }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r0, self.course, self.speed]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// Hypothesis carrying the initial target position explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CandidateXY {
    pub x0: f64,
    pub y0: f64,
    pub course: f64,
    pub speed: f64,
}

impl CandidateXY {
    pub const fn new(x0: f64, y0: f64, course: f64, speed: f64) -> Self {
        Self {
            x0,
            y0,
            course,
            speed,
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x0, self.y0, self.course, self.speed]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// Range form, measured from `observer_start`.
    pub fn to_range_form(self, observer_start: Point) -> Candidate {
        let r0 = Point::new(self.x0, self.y0).distance(&observer_start);
        Candidate::new(r0, self.course, self.speed)
    }
}

/// Closed parameter range `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.min + self.max)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(TmaError::InvalidBounds(format!(
                "{name}: need finite min < max (got [{}, {}])",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Box over the range form `(r0, course, speed)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub r0: Interval,
    pub course: Interval,
    pub speed: Interval,
}

impl SearchBounds {
    /// R in [0, 28000] m, C in [0, 360] deg, S in [0, 25] m/s.
    pub const fn reference() -> Self {
        Self {
            r0: Interval::new(0.0, 28_000.0),
            course: Interval::new(0.0, 360.0),
            speed: Interval::new(0.0, 25.0),
        }
    }

    pub fn to_array(&self) -> [Interval; 3] {
        [self.r0, self.course, self.speed]
    }

    pub fn validate(&self) -> Result<()> {
        self.r0.validate("r0")?;
        self.course.validate("course")?;
        self.speed.validate("speed")
    }

    pub fn contains(&self, c: &Candidate) -> bool {
        self.to_array()
            .iter()
            .zip(c.to_array())
            .all(|(i, v)| i.contains(v))
    }
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self::reference()
    }
}

/// Box over the position form `(x0, y0, course, speed)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBoundsXY {
    pub x0: Interval,
    pub y0: Interval,
    pub course: Interval,
    pub speed: Interval,
}

impl SearchBoundsXY {
    /// X0, Y0 in [0, 20000] m, C in [0, 360] deg, S in [0, 25] m/s.
    pub const fn reference() -> Self {
        Self {
            x0: Interval::new(0.0, 20_000.0),
            y0: Interval::new(0.0, 20_000.0),
            course: Interval::new(0.0, 360.0),
            speed: Interval::new(0.0, 25.0),
        }
    }

    pub fn to_array(&self) -> [Interval; 4] {
        [self.x0, self.y0, self.course, self.speed]
    }

    pub fn from_array(a: [Interval; 4]) -> Self {
        Self {
            x0: a[0],
            y0: a[1],
            course: a[2],
            speed: a[3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.x0.validate("x0")?;
        self.y0.validate("y0")?;
        self.course.validate("course")?;
        self.speed.validate("speed")
    }

    pub fn contains(&self, c: &CandidateXY) -> bool {
        self.to_array()
            .iter()
            .zip(c.to_array())
            .all(|(i, v)| i.contains(v))
    }
}

impl Default for SearchBoundsXY {
    fn default() -> Self {
        Self::reference()
    }
}

/// Result of a bearing cost function, in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostValue {
    pub value: f64,
    /// Terms with a negative radicand (non-metric cost only).
    pub undefined_count: usize,
}

impl CostValue {
    fn defined(value: f64) -> Self {
        Self {
            value,
            undefined_count: 0,
        }
    }
}

/// `a - b` folded into `[-180, 180)`.
#[inline]
pub fn angle_residual(a: f64, b: f64) -> f64 {
    let r = (a - b + 180.0).rem_euclid(360.0) - 180.0;
    if r >= 180.0 {
        -180.0
    } else {
        r
    }
}

fn check_lengths(predicted: &BearingSeries, observed: &BearingSeries) -> Result<()> {
    if predicted.len() != observed.len() {
        return Err(TmaError::LengthMismatch {
            left: predicted.len(),
            right: observed.len(),
        });
    }
    Ok(())
}

/// Root of the summed squared wrapped residuals.
pub fn cost_euclidean(predicted: &BearingSeries, observed: &BearingSeries) -> Result<CostValue> {
    check_lengths(predicted, observed)?;
    if predicted.is_empty() {
        return Err(TmaError::LengthMismatch { left: 0, right: 0 });
    }
    let sum: f64 = predicted
        .bearings_deg
        .iter()
        .zip(&observed.bearings_deg)
        .map(|(p, o)| angle_residual(*p, *o).powi(2))
        .sum();
    Ok(CostValue::defined(sum.sqrt()))
}

/// `Σ sqrt(Θ_M² − Θ_G²)` taken literally on the raw bearing values.
///
/// This is not a metric. A term whose radicand is negative contributes zero
/// and is tallied in `undefined_count`.
pub fn cost_total_deviation_nonmetric(
    predicted: &BearingSeries,
    observed: &BearingSeries,
) -> Result<CostValue> {
    check_lengths(predicted, observed)?;
    let mut value = 0.0;
    let mut undefined_count = 0;
    for (m, g) in predicted.bearings_deg.iter().zip(&observed.bearings_deg) {
        let radicand = m * m - g * g;
        if radicand < 0.0 {
            undefined_count += 1;
        } else {
            value += radicand.sqrt();
        }
    }
    Ok(CostValue {
        value,
        undefined_count,
    })
}

fn track_from_start(start: Point, course: f64, speed: f64, obs: &Track) -> Track {
    let t0 = obs.times.first().copied().unwrap_or(0.0);
    let (s, c) = course.to_radians().sin_cos();
    Track {
        times: obs.times.clone(),
        positions: obs
            .times
            .iter()
            .map(|t| advance(start, s, c, speed * (t - t0)))
            .collect(),
    }
}

/// Target track for a range-form candidate, anchored on bearing `b0` from the
/// first observer position.
pub fn candidate_track(c: &Candidate, b0: f64, obs: &Track) -> Result<Track> {
    let obs0 = *obs
        .positions
        .first()
        .ok_or_else(|| TmaError::Config("observer track is empty".into()))?;
    let start = initial_target_position(obs0, b0, c.r0)?;
    Ok(track_from_start(start, c.course, c.speed, obs))
}

/// Target track for a position-form candidate over the observer times.
pub fn candidate_track_xy(c: &CandidateXY, obs: &Track) -> Track {
    track_from_start(Point::new(c.x0, c.y0), c.course, c.speed, obs)
}

/// Black-box cost over candidates for one observed bearing series.
///
/// Every call to [`evaluate`](Self::evaluate) or
/// [`evaluate_xy`](Self::evaluate_xy) bumps an atomic evaluation counter,
/// so one instance may be shared across worker threads.
#[derive(Debug)]
pub struct BearingObjective {
    observed: Vec<f64>,
    elapsed: Vec<f64>,
    observer: Vec<Point>,
    anchor_bearing: f64,
    anchor_dir: (f64, f64),
    fevals: AtomicU64,
}

impl BearingObjective {
    pub fn new(observed: &BearingSeries, obs_track: &Track) -> Result<Self> {
        if observed.len() != obs_track.len() {
            return Err(TmaError::LengthMismatch {
                left: observed.len(),
                right: obs_track.len(),
            });
        }
        if observed.is_empty() {
            return Err(TmaError::Config("empty observation series".into()));
        }
        let t0 = obs_track.times[0];
        let anchor_bearing = observed.bearings_deg[0];
        Ok(Self {
            observed: observed.bearings_deg.clone(),
            elapsed: obs_track.times.iter().map(|t| t - t0).collect(),
            observer: obs_track.positions.clone(),
            anchor_bearing,
            anchor_dir: anchor_bearing.to_radians().sin_cos(),
            fevals: AtomicU64::new(0),
        })
    }

    /// First observed bearing; range-form candidates start on this line.
    pub fn anchor_bearing(&self) -> f64 {
        self.anchor_bearing
    }

    pub fn observer_start(&self) -> Point {
        self.observer[0]
    }

    pub fn n_samples(&self) -> usize {
        self.observed.len()
    }

    /// Evaluations so far.
    pub fn fevals(&self) -> u64 {
        self.fevals.load(Ordering::Relaxed)
    }

    /// Euclidean bearing cost of a range-form candidate.
    pub fn evaluate(&self, c: &Candidate) -> f64 {
        self.fevals.fetch_add(1, Ordering::Relaxed);
        if !(c.r0.is_finite() && c.r0 > 0.0) {
            return INFEASIBLE_PENALTY;
        }
        let obs0 = self.observer[0];
        let (s, co) = self.anchor_dir;
        let start = Point::new(obs0.x + c.r0 * s, obs0.y + c.r0 * co);
        self.score_track(start, c.course, c.speed)
    }

    /// Euclidean bearing cost of a position-form candidate.
    pub fn evaluate_xy(&self, c: &CandidateXY) -> f64 {
        self.fevals.fetch_add(1, Ordering::Relaxed);
        self.score_track(Point::new(c.x0, c.y0), c.course, c.speed)
    }

    fn score_track(&self, start: Point, course: f64, speed: f64) -> f64 {
        if !(start.x.is_finite() && start.y.is_finite() && course.is_finite() && speed.is_finite()) {
            return INFEASIBLE_PENALTY;
        }
        let (s, c) = course.to_radians().sin_cos();
        let mut sum = 0.0;
        for ((t, o), observed) in self.elapsed.iter().zip(&self.observer).zip(&self.observed) {
            let p = advance(start, s, c, speed * t);
            let dx = p.x - o.x;
            let dy = p.y - o.y;
            if dx == 0.0 && dy == 0.0 {
                return INFEASIBLE_PENALTY;
            }
            let predicted = wrap_360(dx.atan2(dy).to_degrees());
            let r = angle_residual(predicted, *observed);
            sum += r * r;
        }
        sum.sqrt()
    }
}
